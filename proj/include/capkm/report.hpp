#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capkm/rational.hpp"

namespace capkm {

// Line-oriented run report. Keys keep insertion order so the same run
// reproduces the same bytes. Timing keys carry a time_ prefix; determinism
// comparisons drop them.
struct RunReport {
  std::vector<std::pair<std::string, std::string>> kv;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, const Rat& value);  // exact p/q form
  void add(const std::string& key, long long value);
  void add_decimal(const std::string& key, const Rat& value, int digits = 6);
  void verdict(const std::string& key, bool pass);

  std::string text() const;  // key=value lines
  std::string json() const;  // same content as a sidecar object
};

// Report text with every time_ line removed, for byte comparisons.
std::string strip_timing(const std::string& report_text);

// FNV-1a 64-bit over the canonical instance serialization, as hex.
std::string instance_digest(const std::string& canonical);

}  // namespace capkm
