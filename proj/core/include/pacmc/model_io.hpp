#pragma once

#include <filesystem>
#include <iosfwd>

#include "pacmc/templates.hpp"

namespace pacmc {

// Line-oriented key=value text; numbers use the shortest round-trip form,
// so a load reproduces the model bit for bit. Custom templates cannot be saved
// (their basis is code) and raise ContractError.
void save_model(const LearnedModel& model, std::ostream& out);
void save_model(const LearnedModel& model, const std::filesystem::path& path);

// Throws ParseError with the offending line.
LearnedModel load_model(std::istream& in);
LearnedModel load_model(const std::filesystem::path& path);

}  // namespace pacmc
