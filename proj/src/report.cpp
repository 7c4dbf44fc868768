#include "capkm/report.hpp"

#include <cstdint>
#include <sstream>

#include "json.hpp"

namespace capkm {

void RunReport::add(const std::string& key, const std::string& value) {
  kv.emplace_back(key, value);
}

void RunReport::add(const std::string& key, const char* value) {
  kv.emplace_back(key, std::string(value));
}

void RunReport::add(const std::string& key, const Rat& value) {
  kv.emplace_back(key, rat_to_string(value));
}

void RunReport::add(const std::string& key, long long value) {
  kv.emplace_back(key, std::to_string(value));
}

void RunReport::add_decimal(const std::string& key, const Rat& value, int digits) {
  kv.emplace_back(key, rat_to_decimal(value, digits));
}

void RunReport::verdict(const std::string& key, bool pass) {
  kv.emplace_back(key, pass ? "pass" : "fail");
}

std::string RunReport::text() const {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  return out.str();
}

std::string RunReport::json() const {
  nlohmann::ordered_json obj;
  for (const auto& [k, v] : kv) obj[k] = v;
  return obj.dump(2) + "\n";
}

std::string strip_timing(const std::string& report_text) {
  std::istringstream in(report_text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("time_", 0) != 0) out << line << '\n';
  return out.str();
}

std::string instance_digest(const std::string& canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace capkm
