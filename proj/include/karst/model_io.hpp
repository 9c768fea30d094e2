#pragma once

#include "karst/lstm.hpp"
#include "karst/mlp.hpp"
#include "karst/svr.hpp"

#include <filesystem>
#include <variant>

namespace karst {

/// Versioned text container: a `karstml model v1` header, scalar
/// `field` lines, and shape-tagged `array name rows cols` blocks with
/// full round-trip (%.17g) precision.
void save_model(const MlpModel& model, const std::filesystem::path& path);
void save_model(const LstmModel& model, const std::filesystem::path& path);
void save_model(const SvrModel& model, const std::filesystem::path& path);

using AnyModel = std::variant<MlpModel, LstmModel, SvrModel>;

AnyModel load_model(const std::filesystem::path& path);

}  // namespace karst
