#include "itcr/dataset.hpp"

#include "itcr/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace itcr {

std::string_view to_string(PredictorClass c)
{
    switch (c) {
    case PredictorClass::TS: return "TS";
    case PredictorClass::TC: return "TC";
    case PredictorClass::D3: return "3D";
    case PredictorClass::QC: return "QC";
    case PredictorClass::AP: return "AP";
    }
    return "?";
}

std::optional<PredictorClass> parse_predictor_class(std::string_view label)
{
    label = text::trim(label);
    for (auto c : kAllClasses) {
        if (label == to_string(c)) {
            return c;
        }
    }
    return std::nullopt;
}

std::vector<PredictorClass> parse_class_list(std::string_view list)
{
    std::vector<PredictorClass> out;
    std::string normalized(list);
    std::replace(normalized.begin(), normalized.end(), ',', '+');
    for (auto tok : text::split(normalized, '+')) {
        tok = text::trim(tok);
        if (tok.empty()) {
            continue;
        }
        auto c = parse_predictor_class(tok);
        if (!c) {
            throw ValidationError("unknown class '" + std::string(tok) + "'");
        }
        if (std::find(out.begin(), out.end(), *c) == out.end()) {
            out.push_back(*c);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string join_classes(const std::vector<PredictorClass>& classes, char sep)
{
    std::string out;
    for (auto c : classes) {
        if (!out.empty()) {
            out += sep;
        }
        out += to_string(c);
    }
    return out;
}

Dataset Dataset::select_columns(const IndexList& columns) const
{
    Dataset out;
    out.compound_ids = compound_ids;
    out.response = response;
    out.values.resize(values.rows(), static_cast<Index>(columns.size()));
    out.predictor_ids.reserve(columns.size());
    out.classes.reserve(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const Index c = columns[j];
        if (c < 0 || c >= values.cols()) {
            throw ValidationError("column index " + std::to_string(c) + " out of range");
        }
        out.values.col(static_cast<Index>(j)) = values.col(c);
        out.predictor_ids.push_back(predictor_ids[static_cast<std::size_t>(c)]);
        out.classes.push_back(classes[static_cast<std::size_t>(c)]);
    }
    return out;
}

Dataset Dataset::select_rows(const IndexList& rows) const
{
    Dataset out;
    out.predictor_ids = predictor_ids;
    out.classes = classes;
    out.values.resize(static_cast<Index>(rows.size()), values.cols());
    out.response.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Index r = rows[i];
        if (r < 0 || r >= values.rows()) {
            throw ValidationError("row index " + std::to_string(r) + " out of range");
        }
        out.values.row(static_cast<Index>(i)) = values.row(r);
        out.response(static_cast<Index>(i)) = response(r);
        out.compound_ids.push_back(compound_ids[static_cast<std::size_t>(r)]);
    }
    return out;
}

Dataset Dataset::without_row(Index row) const
{
    IndexList rows;
    rows.reserve(static_cast<std::size_t>(values.rows()));
    for (Index i = 0; i < values.rows(); ++i) {
        if (i != row) {
            rows.push_back(i);
        }
    }
    return select_rows(rows);
}

std::vector<std::pair<PredictorClass, IndexList>> Dataset::groups_by_class() const
{
    std::vector<std::pair<PredictorClass, IndexList>> out;
    for (auto c : kAllClasses) {
        IndexList cols;
        for (std::size_t j = 0; j < classes.size(); ++j) {
            if (classes[j] == c) {
                cols.push_back(static_cast<Index>(j));
            }
        }
        if (!cols.empty()) {
            out.emplace_back(c, std::move(cols));
        }
    }
    return out;
}

ValidationReport validate(const Dataset& d)
{
    ValidationReport r;
    auto err = [&](std::string loc, std::string msg) { r.errors.push_back({std::move(loc), std::move(msg)}); };

    const Index m = d.values.rows();
    const Index n = d.values.cols();
    if (m < 2) {
        err("dataset", "need at least 2 compounds, got " + std::to_string(m));
    }
    if (n < 1) {
        err("dataset", "need at least 1 predictor");
    }
    if (static_cast<Index>(d.compound_ids.size()) != m) {
        err("compound_ids", "expected " + std::to_string(m) + " ids, got " + std::to_string(d.compound_ids.size()));
    }
    if (static_cast<Index>(d.predictor_ids.size()) != n) {
        err("predictor_ids", "expected " + std::to_string(n) + " ids, got " + std::to_string(d.predictor_ids.size()));
    }
    if (d.response.size() != m) {
        err("response", "expected " + std::to_string(m) + " entries, got " + std::to_string(d.response.size()));
    }
    if (static_cast<Index>(d.classes.size()) != n) {
        err("class_map", "expected " + std::to_string(n) + " class entries, got " + std::to_string(d.classes.size()));
    }
    for (Index i = 0; i < d.response.size(); ++i) {
        const int v = d.response(i);
        if (v != 0 && v != 1) {
            err("response[" + std::to_string(i) + "]", "value " + std::to_string(v) + " not in {0,1}");
        }
    }
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            if (!std::isfinite(d.values(i, j))) {
                err("values[" + std::to_string(i) + "," + std::to_string(j) + "]", "non-finite value");
            }
        }
    }
    auto check_unique = [&](const std::vector<std::string>& ids, const char* what) {
        std::unordered_set<std::string> seen;
        for (const auto& id : ids) {
            if (id.empty()) {
                err(what, "empty identifier");
            } else if (!seen.insert(id).second) {
                err(what, "duplicate identifier '" + id + "'");
            }
        }
    };
    check_unique(d.compound_ids, "compound_ids");
    check_unique(d.predictor_ids, "predictor_ids");

    if (r.errors.empty()) {
        Index positives = d.response.sum();
        if (positives == 0 || positives == m) {
            r.warnings.push_back({"response", "only one response class present"});
        }
    }
    return r;
}

namespace {

struct Line {
    std::size_t number;
    std::string content;
};

std::vector<Line> read_lines(std::istream& in)
{
    std::vector<Line> lines;
    std::string s;
    std::size_t no = 0;
    while (std::getline(in, s)) {
        ++no;
        if (!s.empty() && s.back() == '\r') {
            s.pop_back();
        }
        if (no == 1 && s.size() >= 3 && s.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            s.erase(0, 3);
        }
        if (text::trim(s).empty()) {
            continue;
        }
        lines.push_back({no, std::move(s)});
    }
    return lines;
}

[[noreturn]] void fail(const std::string& where, const std::string& msg)
{
    throw ValidationError(where + ": " + msg);
}

} // namespace

Dataset parse_dataset(std::istream& matrix_csv, std::istream& classmap_csv)
{
    // class map
    const auto cm_lines = read_lines(classmap_csv);
    if (cm_lines.empty()) {
        fail("class map", "empty file");
    }
    {
        auto header = text::split(cm_lines.front().content, ',');
        if (header.size() != 2 || text::trim(header[0]) != "predictor_id" || text::trim(header[1]) != "class") {
            fail("class map line 1", "malformed header, expected 'predictor_id,class'");
        }
    }
    std::unordered_map<std::string, PredictorClass> class_of;
    for (std::size_t l = 1; l < cm_lines.size(); ++l) {
        const auto& line = cm_lines[l];
        const std::string where = "class map line " + std::to_string(line.number);
        auto cells = text::split(line.content, ',');
        if (cells.size() != 2) {
            fail(where, "expected 2 fields, got " + std::to_string(cells.size()));
        }
        std::string id(text::trim(cells[0]));
        auto cls = parse_predictor_class(cells[1]);
        if (!cls) {
            fail(where, "unknown class '" + std::string(text::trim(cells[1])) + "' for predictor '" + id + "'");
        }
        if (!class_of.emplace(id, *cls).second) {
            fail(where, "duplicate predictor id '" + id + "'");
        }
    }

    // matrix
    const auto lines = read_lines(matrix_csv);
    if (lines.empty()) {
        fail("matrix", "empty file");
    }
    auto header = text::split(lines.front().content, ',');
    if (header.size() < 3 || text::trim(header[0]) != "compound_id" || text::trim(header[1]) != "response") {
        fail("matrix line 1", "malformed header, expected 'compound_id,response,<predictor ids...>'");
    }
    Dataset d;
    std::unordered_set<std::string> seen;
    for (std::size_t c = 2; c < header.size(); ++c) {
        std::string id(text::trim(header[c]));
        if (id.empty()) {
            fail("matrix line 1", "empty predictor id in column " + std::to_string(c + 1));
        }
        if (!seen.insert(id).second) {
            fail("matrix line 1", "duplicate predictor id '" + id + "'");
        }
        auto it = class_of.find(id);
        if (it == class_of.end()) {
            fail("matrix line 1", "predictor '" + id + "' missing from class map");
        }
        d.predictor_ids.push_back(id);
        d.classes.push_back(it->second);
    }
    for (const auto& [id, cls] : class_of) {
        if (!seen.count(id)) {
            fail("class map", "predictor '" + id + "' not present in matrix");
        }
    }

    const Index n = static_cast<Index>(d.predictor_ids.size());
    const Index m = static_cast<Index>(lines.size() - 1);
    d.values.resize(m, n);
    d.response.resize(m);
    std::unordered_set<std::string> seen_compounds;
    for (Index i = 0; i < m; ++i) {
        const auto& line = lines[static_cast<std::size_t>(i + 1)];
        const std::string where = "matrix line " + std::to_string(line.number);
        auto cells = text::split(line.content, ',');
        if (static_cast<Index>(cells.size()) != n + 2) {
            fail(where, "expected " + std::to_string(n + 2) + " fields, got " + std::to_string(cells.size()));
        }
        std::string id(text::trim(cells[0]));
        if (id.empty()) {
            fail(where, "empty compound id");
        }
        if (!seen_compounds.insert(id).second) {
            fail(where, "duplicate compound id '" + id + "'");
        }
        d.compound_ids.push_back(id);
        long long resp = 0;
        if (!text::parse_int(cells[1], resp) || (resp != 0 && resp != 1)) {
            fail(where, "response '" + std::string(text::trim(cells[1])) + "' not in {0,1}");
        }
        d.response(i) = static_cast<int>(resp);
        for (Index j = 0; j < n; ++j) {
            double v = 0.0;
            const auto cell = cells[static_cast<std::size_t>(j + 2)];
            if (!text::parse_double(cell, v)) {
                fail(where, "non-numeric cell '" + std::string(text::trim(cell)) + "' at row '" + id +
                                "', column '" + d.predictor_ids[static_cast<std::size_t>(j)] + "'");
            }
            d.values(i, j) = v;
        }
    }

    auto report = validate(d);
    if (!report.is_valid()) {
        fail(report.errors.front().location, report.errors.front().message);
    }
    return d;
}

Dataset load_dataset(const std::filesystem::path& matrix_path, const std::filesystem::path& classmap_path)
{
    std::ifstream matrix(matrix_path);
    if (!matrix) {
        throw ValidationError("cannot open matrix file '" + matrix_path.string() + "'");
    }
    std::ifstream classmap(classmap_path);
    if (!classmap) {
        throw ValidationError("cannot open class map file '" + classmap_path.string() + "'");
    }
    return parse_dataset(matrix, classmap);
}

void write_matrix_csv(const Dataset& d, std::ostream& out)
{
    out << "compound_id,response";
    for (const auto& id : d.predictor_ids) {
        out << ',' << id;
    }
    out << '\n';
    for (Index i = 0; i < d.values.rows(); ++i) {
        out << d.compound_ids[static_cast<std::size_t>(i)] << ',' << d.response(i);
        for (Index j = 0; j < d.values.cols(); ++j) {
            out << ',' << text::format_exact(d.values(i, j));
        }
        out << '\n';
    }
}

void write_classmap_csv(const Dataset& d, std::ostream& out)
{
    out << "predictor_id,class\n";
    for (std::size_t j = 0; j < d.predictor_ids.size(); ++j) {
        out << d.predictor_ids[j] << ',' << to_string(d.classes[j]) << '\n';
    }
}

void save_dataset(const Dataset& d, const std::filesystem::path& matrix_path,
                  const std::filesystem::path& classmap_path)
{
    std::ofstream matrix(matrix_path);
    std::ofstream classmap(classmap_path);
    if (!matrix || !classmap) {
        throw std::runtime_error("cannot write dataset files");
    }
    write_matrix_csv(d, matrix);
    write_classmap_csv(d, classmap);
}

Dataset subset_by_class(const Dataset& d, const std::vector<PredictorClass>& classes)
{
    if (classes.empty()) {
        throw ValidationError("subset_by_class: class set is empty");
    }
    IndexList keep;
    for (std::size_t j = 0; j < d.classes.size(); ++j) {
        if (std::find(classes.begin(), classes.end(), d.classes[j]) != classes.end()) {
            keep.push_back(static_cast<Index>(j));
        }
    }
    if (keep.empty()) {
        throw ValidationError("subset_by_class: no predictors of class " + join_classes(classes) + " in dataset");
    }
    return d.select_columns(keep);
}

} // namespace itcr
