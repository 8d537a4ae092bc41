#include "apfa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace apfa {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_int(const std::string& s, long long& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [p, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && p == end;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<int> Covariate::code_set() const {
    std::set<int> s(codes.begin(), codes.end());
    return {s.begin(), s.end()};
}

void Dataset::check() const {
    const int p = width();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (static_cast<int>(rows[k].size()) != p)
            throw DataError("row " + std::to_string(k + 1) + ": expected " + std::to_string(p) +
                            " values, got " + std::to_string(rows[k].size()));
        for (int j = 0; j < p; ++j)
            if (rows[k][j] < 1 || rows[k][j] > alphabet_sizes[j])
                throw DataError("row " + std::to_string(k + 1) + ": value " +
                                std::to_string(rows[k][j]) + " outside alphabet of column " +
                                std::to_string(j + 1));
    }
    if (covariate) {
        const auto& z = *covariate;
        const std::size_t n =
            z.kind == CovariateKind::categorical ? z.codes.size() : z.values.size();
        if (n != rows.size()) throw DataError("covariate length differs from row count");
    }
}

Dataset read_dataset(std::istream& in, const ReadOptions& options) {
    Dataset d;
    std::vector<int> declared_alphabets;
    std::vector<std::string> names;
    int covariate_col = -1;  // index within the raw cells
    bool saw_header = false;

    std::string line;
    int line_no = 0;
    int raw_width = -1;

    std::vector<std::vector<std::int32_t>> rows;
    std::vector<int> cov_codes;
    std::vector<double> cov_values;

    auto resolve_covariate = [&](int width) {
        if (options.covariate.empty()) return;
        if (!names.empty()) {
            auto it = std::find(names.begin(), names.end(), options.covariate);
            if (it != names.end()) {
                covariate_col = static_cast<int>(it - names.begin());
                return;
            }
        }
        long long idx;
        if (parse_int(options.covariate, idx) && idx >= 1 && idx <= width) {
            covariate_col = static_cast<int>(idx - 1);
            return;
        }
        throw DataError("unknown covariate column '" + options.covariate + "'");
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (t.rfind("#alphabets", 0) == 0) {
                for (const std::string& cell : split_csv(trim(t.substr(10)))) {
                    long long k;
                    if (!parse_int(cell, k) || k < 1) fail(line_no, "bad #alphabets directive");
                    declared_alphabets.push_back(static_cast<int>(k));
                }
            }
            continue;  // other '#' lines are comments
        }
        std::vector<std::string> cells = split_csv(t);
        if (options.header && !saw_header) {
            saw_header = true;
            names = cells;
            raw_width = static_cast<int>(cells.size());
            resolve_covariate(raw_width);
            continue;
        }
        if (raw_width < 0) {
            raw_width = static_cast<int>(cells.size());
            resolve_covariate(raw_width);
        }
        if (static_cast<int>(cells.size()) != raw_width)
            fail(line_no, "expected " + std::to_string(raw_width) + " values, got " +
                              std::to_string(cells.size()));

        std::vector<std::int32_t> row;
        row.reserve(raw_width);
        for (int j = 0; j < raw_width; ++j) {
            if (j == covariate_col) {
                if (options.covariate_continuous) {
                    double z;
                    if (!parse_double(cells[j], z)) fail(line_no, "bad covariate value '" + cells[j] + "'");
                    cov_values.push_back(z);
                } else {
                    long long z;
                    if (!parse_int(cells[j], z)) fail(line_no, "bad covariate code '" + cells[j] + "'");
                    cov_codes.push_back(static_cast<int>(z));
                }
                continue;
            }
            long long v;
            if (!parse_int(cells[j], v) || v < 1)
                fail(line_no, "category values must be positive integers, got '" + cells[j] + "'");
            row.push_back(static_cast<std::int32_t>(v));
        }
        rows.push_back(std::move(row));
    }

    if (!options.covariate.empty() && covariate_col < 0)
        throw DataError("unknown covariate column '" + options.covariate + "' (empty input?)");

    const int p = rows.empty() ? (raw_width < 0 ? 0 : raw_width - (covariate_col >= 0 ? 1 : 0))
                               : static_cast<int>(rows.front().size());
    d.alphabet_sizes.assign(p, 1);
    for (const auto& r : rows)
        for (int j = 0; j < p; ++j) d.alphabet_sizes[j] = std::max(d.alphabet_sizes[j], r[j]);
    if (!declared_alphabets.empty()) {
        if (static_cast<int>(declared_alphabets.size()) != p)
            throw DataError("#alphabets declares " + std::to_string(declared_alphabets.size()) +
                            " columns, data has " + std::to_string(p));
        for (int j = 0; j < p; ++j) {
            if (declared_alphabets[j] < d.alphabet_sizes[j])
                throw DataError("#alphabets column " + std::to_string(j + 1) +
                                " smaller than observed maximum");
            d.alphabet_sizes[j] = declared_alphabets[j];
        }
    }
    d.rows = std::move(rows);

    if (!names.empty()) {
        d.column_names.clear();
        for (int j = 0; j < raw_width; ++j)
            if (j != covariate_col) d.column_names.push_back(names[j]);
    }
    if (covariate_col >= 0) {
        Covariate z;
        z.name = !names.empty() ? names[covariate_col] : options.covariate;
        z.kind = options.covariate_continuous ? CovariateKind::continuous
                                              : CovariateKind::categorical;
        z.codes = std::move(cov_codes);
        z.values = std::move(cov_values);
        d.covariate = std::move(z);
    }
    d.check();
    return d;
}

Dataset read_dataset(const std::string& text, const ReadOptions& options) {
    std::istringstream is(text);
    return read_dataset(is, options);
}

Dataset read_dataset_file(const std::string& path, const ReadOptions& options) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path + "'");
    return read_dataset(f, options);
}

std::string write_csv(const Dataset& d, bool header) {
    std::ostringstream os;
    if (header) {
        for (int j = 0; j < d.width(); ++j) {
            if (j) os << ',';
            os << (j < static_cast<int>(d.column_names.size()) && !d.column_names[j].empty()
                       ? d.column_names[j]
                       : "X" + std::to_string(j + 1));
        }
        if (d.covariate) os << ',' << (d.covariate->name.empty() ? "Z" : d.covariate->name);
        os << '\n';
    }
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        for (std::size_t j = 0; j < d.rows[k].size(); ++j) {
            if (j) os << ',';
            os << d.rows[k][j];
        }
        if (d.covariate) {
            os << ',';
            if (d.covariate->kind == CovariateKind::categorical)
                os << d.covariate->codes[k];
            else
                os << d.covariate->values[k];
        }
        os << '\n';
    }
    return os.str();
}

Dataset dataset_from_rows(std::vector<std::vector<std::int32_t>> rows) {
    int p = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    std::vector<int> alphabets(p, 1);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != p) throw DataError("ragged rows");
        for (int j = 0; j < p; ++j) alphabets[j] = std::max(alphabets[j], r[j]);
    }
    return dataset_from_rows(std::move(rows), std::move(alphabets));
}

Dataset dataset_from_rows(std::vector<std::vector<std::int32_t>> rows,
                          std::vector<int> alphabet_sizes) {
    Dataset d;
    d.rows = std::move(rows);
    d.alphabet_sizes = std::move(alphabet_sizes);
    d.check();
    return d;
}

}  // namespace apfa
