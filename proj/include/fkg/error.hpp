// Copyright 2026 The fkg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FKG_ERROR_HPP_
#define FKG_ERROR_HPP_

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fkg {

// Every failure raised by the library carries one of these codes. The service
// layer maps each code to exactly one HTTP status and machine code string.
enum class ErrorCode {
  kInvalidArgument,
  kEmptyInput,
  kQuerySyntax,
  kUnknownIngredient,
  kUnknownRecipe,
  kUnknownNutrient,
  kOntologyCycle,
  kOntologyDuplicateId,
  kOntologyDanglingParent,
  kOntologyRootCount,
  kOntologyInvalid,
  kInvalidRecipe,
  kMissingDensity,
  kMissingPieceMass,
  kMissingReference,
  kStaleBase,
  kVersionConflict,
  kInconsistentResult,
  kEmptyCorpus,
  kUntrainedModel,
  kLogCorrupt,
  kIo,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::kInvalidArgument,    ErrorCode::kEmptyInput,
    ErrorCode::kQuerySyntax,        ErrorCode::kUnknownIngredient,
    ErrorCode::kUnknownRecipe,      ErrorCode::kUnknownNutrient,
    ErrorCode::kOntologyCycle,      ErrorCode::kOntologyDuplicateId,
    ErrorCode::kOntologyDanglingParent, ErrorCode::kOntologyRootCount,
    ErrorCode::kOntologyInvalid,    ErrorCode::kInvalidRecipe,
    ErrorCode::kMissingDensity,     ErrorCode::kMissingPieceMass,
    ErrorCode::kMissingReference,   ErrorCode::kStaleBase,
    ErrorCode::kVersionConflict,    ErrorCode::kInconsistentResult,
    ErrorCode::kEmptyCorpus,        ErrorCode::kUntrainedModel,
    ErrorCode::kLogCorrupt,         ErrorCode::kIo,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kQuerySyntax: return "query_syntax";
    case ErrorCode::kUnknownIngredient: return "unknown_ingredient";
    case ErrorCode::kUnknownRecipe: return "unknown_recipe";
    case ErrorCode::kUnknownNutrient: return "unknown_nutrient";
    case ErrorCode::kOntologyCycle: return "ontology_cycle";
    case ErrorCode::kOntologyDuplicateId: return "ontology_duplicate_id";
    case ErrorCode::kOntologyDanglingParent: return "ontology_dangling_parent";
    case ErrorCode::kOntologyRootCount: return "ontology_root_count";
    case ErrorCode::kOntologyInvalid: return "ontology_invalid";
    case ErrorCode::kInvalidRecipe: return "invalid_recipe";
    case ErrorCode::kMissingDensity: return "missing_density";
    case ErrorCode::kMissingPieceMass: return "missing_piece_mass";
    case ErrorCode::kMissingReference: return "missing_reference";
    case ErrorCode::kStaleBase: return "stale_base";
    case ErrorCode::kVersionConflict: return "version_conflict";
    case ErrorCode::kInconsistentResult: return "inconsistent_result";
    case ErrorCode::kEmptyCorpus: return "empty_corpus";
    case ErrorCode::kUntrainedModel: return "untrained_model";
    case ErrorCode::kLogCorrupt: return "log_corrupt";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }

  // Path of the offending input field, e.g. "uses[2].ingredient_id".
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

// Query syntax errors additionally carry the 0-based character offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(ErrorCode::kQuerySyntax,
              message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace fkg

#endif  // FKG_ERROR_HPP_
