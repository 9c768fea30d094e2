#pragma once

#include "karst/data.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace karst {

/// Flat `key = value` config text. `#` starts a comment; an optional
/// `[section]` header prefixes following keys as "section.key".
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_kv_file(const std::filesystem::path& path);
KeyValueMap parse_kv_text(const std::string& text);

/// SyntheticSpec from keys: months, seed, seasonal_amplitude,
/// autocorrelation, noise_level, discharge_min, discharge_max, start,
/// station_annual_means (comma-separated, 9 values). Missing keys keep
/// their defaults; unknown keys are an error.
SyntheticSpec synthetic_spec_from_kv(const KeyValueMap& kv);

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void save_synthetic_spec(const SyntheticSpec& spec,
                         const std::filesystem::path& path);

/// Canonical one-line-per-key rendering; also the fingerprint input for
/// synthetic runs.
std::string synthetic_spec_text(const SyntheticSpec& spec);

/// FNV-1a 64-bit content hash, as 16 hex digits.
std::string fingerprint_bytes(const std::string& bytes);
std::string fingerprint_file(const std::filesystem::path& path);

}  // namespace karst
