/* dataset.hpp -- categorical longitudinal datasets and CSV ingestion. */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apfa/errors.hpp"

namespace apfa {

enum class CovariateKind { categorical, continuous };

struct Covariate {
    std::string name;
    CovariateKind kind = CovariateKind::categorical;
    std::vector<int> codes;      // categorical: original integer codes, one per row
    std::vector<double> values;  // continuous: one per row

    /// Sorted distinct codes (categorical).
    std::vector<int> code_set() const;
};

/// N rows of p integer-coded categories (1-based), plus an optional covariate
/// column. Alphabets are per-column symbol ranges 1..alphabet_sizes[j].
struct Dataset {
    std::vector<std::vector<std::int32_t>> rows;
    std::vector<int> alphabet_sizes;
    std::vector<std::string> column_names;  // empty when the source had no header
    std::optional<Covariate> covariate;

    std::int64_t size() const { return static_cast<std::int64_t>(rows.size()); }
    int width() const { return static_cast<int>(alphabet_sizes.size()); }

    /// Throws DataError if any row has the wrong length or an out-of-alphabet
    /// value, or the covariate length mismatches.
    void check() const;
};

struct ReadOptions {
    bool header = false;
    std::string covariate;             // column name, or 1-based index; empty = none
    bool covariate_continuous = false;
};

/// Parses comma-separated values. Category cells must be positive integers.
/// Lines starting with '#' are directives or comments; the directive
/// `#alphabets k1,k2,...` declares per-column alphabet sizes (category
/// columns only, in file order). Without a declaration, alphabets are
/// inferred as 1..max(code) per column. Errors carry 1-based line numbers.
Dataset read_dataset(std::istream& in, const ReadOptions& options = {});
Dataset read_dataset(const std::string& text, const ReadOptions& options = {});
Dataset read_dataset_file(const std::string& path, const ReadOptions& options = {});

/// Inverse of read_dataset for datasets (covariate column appended last when
/// present). write(read(x)) == x for files without comments.
std::string write_csv(const Dataset& d, bool header = false);

/// Builds a dataset from in-memory rows; alphabets inferred as 1..max(code).
Dataset dataset_from_rows(std::vector<std::vector<std::int32_t>> rows);

/// Same, with alphabets given explicitly (must cover every observed code).
Dataset dataset_from_rows(std::vector<std::vector<std::int32_t>> rows,
                          std::vector<int> alphabet_sizes);

}  // namespace apfa
