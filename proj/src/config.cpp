#include "karst/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace karst {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number_of(const KeyValueMap& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: bad numeric value for '" + key + "': '" +
                          it->second + "'");
  }
}

}  // namespace

KeyValueMap parse_kv_text(const std::string& text) {
  KeyValueMap kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    kv[key] = value;
  }
  return kv;
}

KeyValueMap parse_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

SyntheticSpec synthetic_spec_from_kv(const KeyValueMap& kv) {
  SyntheticSpec spec;
  for (const auto& [key, value] : kv) {
    if (key == "months" || key == "seed" || key == "seasonal_amplitude" ||
        key == "autocorrelation" || key == "noise_level" ||
        key == "discharge_min" || key == "discharge_max" || key == "start" ||
        key == "station_annual_means") {
      continue;
    }
    throw ValidationError("config: unknown synthetic key '" + key + "'");
  }
  spec.months = static_cast<int>(number_of(kv, "months", spec.months));
  spec.seed = static_cast<std::uint64_t>(
      number_of(kv, "seed", static_cast<double>(spec.seed)));
  spec.seasonal_amplitude =
      number_of(kv, "seasonal_amplitude", spec.seasonal_amplitude);
  spec.autocorrelation = number_of(kv, "autocorrelation", spec.autocorrelation);
  spec.noise_level = number_of(kv, "noise_level", spec.noise_level);
  spec.discharge_min = number_of(kv, "discharge_min", spec.discharge_min);
  spec.discharge_max = number_of(kv, "discharge_max", spec.discharge_max);
  if (auto it = kv.find("start"); it != kv.end()) {
    spec.start = YearMonth::parse(it->second);
  }
  if (auto it = kv.find("station_annual_means"); it != kv.end()) {
    std::stringstream ss(it->second);
    std::string field;
    int i = 0;
    while (std::getline(ss, field, ',')) {
      if (i >= kStations) break;
      try {
        spec.station_annual_means[static_cast<size_t>(i)] = std::stod(trim(field));
      } catch (const std::exception&) {
        throw ValidationError("config: bad station mean '" + field + "'");
      }
      ++i;
    }
    if (i != kStations) {
      throw ValidationError("config: station_annual_means needs exactly 9 values");
    }
  }
  spec.validate();
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  return synthetic_spec_from_kv(parse_kv_file(path));
}

std::string synthetic_spec_text(const SyntheticSpec& spec) {
  std::ostringstream out;
  char buf[40];
  out << "months = " << spec.months << '\n';
  out << "seed = " << spec.seed << '\n';
  out << "start = " << spec.start.str() << '\n';
  auto number = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << key << " = " << buf << '\n';
  };
  number("seasonal_amplitude", spec.seasonal_amplitude);
  number("autocorrelation", spec.autocorrelation);
  number("noise_level", spec.noise_level);
  number("discharge_min", spec.discharge_min);
  number("discharge_max", spec.discharge_max);
  out << "station_annual_means = ";
  for (int s = 0; s < kStations; ++s) {
    std::snprintf(buf, sizeof(buf), "%.17g", spec.station_annual_means[static_cast<size_t>(s)]);
    out << buf << (s + 1 < kStations ? "," : "\n");
  }
  return out.str();
}

void save_synthetic_spec(const SyntheticSpec& spec,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config '" + path.string() + "'");
  out << synthetic_spec_text(spec);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fingerprint_bytes(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::stringstream buf;
  buf << in.rdbuf();
  return fingerprint_bytes(buf.str());
}

}  // namespace karst
