#ifndef ITCR_TYPES_HPP
#define ITCR_TYPES_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace itcr {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<Index>;

// Input or contract violation. The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric breakdown (singular system, non-finite criterion, ...). Exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Descriptor family of a predictor column. The declaration order is the
// canonical group order used everywhere (ITC signatures, reports).
enum class PredictorClass : std::uint8_t { TS, TC, D3, QC, AP };

inline constexpr std::array<PredictorClass, 5> kAllClasses = {
    PredictorClass::TS, PredictorClass::TC, PredictorClass::D3, PredictorClass::QC, PredictorClass::AP};

// File label; D3 is spelled "3D" on disk.
std::string_view to_string(PredictorClass c);
std::optional<PredictorClass> parse_predictor_class(std::string_view label);

// Parses a '+' or ',' separated list such as "TS+TC+AP".
std::vector<PredictorClass> parse_class_list(std::string_view text);
std::string join_classes(const std::vector<PredictorClass>& classes, char sep = '+');

} // namespace itcr

#endif // ITCR_TYPES_HPP
