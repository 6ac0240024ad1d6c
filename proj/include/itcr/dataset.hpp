#ifndef ITCR_DATASET_HPP
#define ITCR_DATASET_HPP

#include "itcr/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace itcr {

struct Issue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool is_valid() const { return errors.empty(); }
};

// Compounds x predictors matrix with a binary response and one descriptor
// class per predictor. Positions are authoritative: every index handed out by
// downstream modules refers to the row/column order of the Dataset it came from.
struct Dataset {
    std::vector<std::string> compound_ids;
    std::vector<std::string> predictor_ids;
    Matrix values;                             // m x n
    Eigen::VectorXi response;                  // m, entries in {0,1}
    std::vector<PredictorClass> classes;       // n, class of each predictor column

    Index compounds() const { return values.rows(); }
    Index predictors() const { return values.cols(); }

    Vector response_as_real() const { return response.cast<double>(); }

    // Keeps the given columns in the given order.
    Dataset select_columns(const IndexList& columns) const;
    // Drops one compound; used to build leave-one-out training folds.
    Dataset without_row(Index row) const;
    Dataset select_rows(const IndexList& rows) const;

    // Column positions of each class in canonical class order; empty classes omitted.
    std::vector<std::pair<PredictorClass, IndexList>> groups_by_class() const;
};

ValidationReport validate(const Dataset& d);

// Throws ValidationError with a message naming the first problem.
Dataset load_dataset(const std::filesystem::path& matrix_path,
                     const std::filesystem::path& classmap_path);

// Parsing entry points used by load_dataset; exposed for tests.
Dataset parse_dataset(std::istream& matrix_csv, std::istream& classmap_csv);

// Writes the two CSV files with 17 significant digits, so loading them back
// reproduces every value bit-exactly.
void save_dataset(const Dataset& d, const std::filesystem::path& matrix_path,
                  const std::filesystem::path& classmap_path);
void write_matrix_csv(const Dataset& d, std::ostream& out);
void write_classmap_csv(const Dataset& d, std::ostream& out);

// Keeps columns whose class is in `classes`, order preserved.
Dataset subset_by_class(const Dataset& d, const std::vector<PredictorClass>& classes);

} // namespace itcr

#endif // ITCR_DATASET_HPP
