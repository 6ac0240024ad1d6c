#include "itcr/report.hpp"

#include "itcr/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace itcr {

using text::format_exact;

namespace {

struct ParsedReport {
    std::map<std::string, std::string> keys;
    std::map<std::string, std::vector<std::string>> sections;
};

ParsedReport parse_report(std::istream& in)
{
    ParsedReport p;
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        if (t.front() == '[' && t.back() == ']') {
            section = std::string(t.substr(1, t.size() - 2));
            p.sections[section];
            continue;
        }
        if (!section.empty()) {
            p.sections[section].emplace_back(t);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("report: malformed line '" + std::string(t) + "'");
        }
        p.keys[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
    }
    return p;
}

const std::string& require(const ParsedReport& p, const std::string& key)
{
    auto it = p.keys.find(key);
    if (it == p.keys.end()) {
        throw ValidationError("report: missing key '" + key + "'");
    }
    return it->second;
}

double require_double(const ParsedReport& p, const std::string& key)
{
    double v = 0.0;
    const auto& s = require(p, key);
    if (!text::parse_double(s, v)) {
        throw ValidationError("report: key '" + key + "' is not a number: '" + s + "'");
    }
    return v;
}

Index require_index(const ParsedReport& p, const std::string& key)
{
    long long v = 0;
    const auto& s = require(p, key);
    if (!text::parse_int(s, v)) {
        throw ValidationError("report: key '" + key + "' is not an integer: '" + s + "'");
    }
    return static_cast<Index>(v);
}

std::string pct_or_na(const std::optional<double>& v)
{
    return v ? text::format_fixed(text::round_half_up_2(*v), 2) : "NA";
}

template <typename T>
std::string join(const std::vector<T>& items, char sep)
{
    std::string out;
    for (const auto& it : items) {
        if (!out.empty()) {
            out += sep;
        }
        out += it;
    }
    return out;
}

} // namespace

void write_itc_trace(std::ostream& out, const ITCResult& result, const Dataset& d)
{
    out << "# ITC trace\n";
    out << "compounds = " << d.compounds() << '\n';
    out << "predictors = " << d.predictors() << '\n';
    out << "iterations = " << result.iterations.size() << '\n';
    out << "termination = " << to_string(result.termination) << '\n';
    for (std::size_t w = 0; w < result.warnings.size(); ++w) {
        out << "warning." << w + 1 << " = " << result.warnings[w] << '\n';
    }
    for (const auto& it : result.iterations) {
        out << "\n[iteration " << it.iteration << "]\n";
        std::string groups;
        for (std::size_t g = 0; g < it.group_classes.size(); ++g) {
            groups += (g ? "," : "") + std::string(to_string(it.group_classes[g])) + ":" + std::to_string(it.group_sizes[g]);
        }
        out << "predictors_in," << it.predictors_in << '\n';
        out << "groups," << groups << '\n';
        std::string cells;
        for (const auto& [sig, size] : it.cell_sizes) {
            cells += (cells.empty() ? "" : ",") + sig + ":" + std::to_string(size);
        }
        out << "cells," << cells << '\n';
        out << "occ_ratio," << format_exact(it.occ_ratio) << '\n';
        for (const auto& p : it.pairs) {
            out << "pair," << p.left_signature << '/' << p.right_signature << ",left=" << p.left_size
                << ",right=" << p.right_size << ",errors=" << p.errors << ",error_rate=" << format_exact(p.error_rate)
                << ",degenerate=" << (p.degenerate ? 1 : 0) << '\n';
        }
        const auto& win = it.pairs[static_cast<std::size_t>(it.winner)];
        out << "winner," << win.left_signature << '/' << win.right_signature << '\n';
        out << "selected_count," << it.selected.size() << '\n';
        std::string per_class;
        for (const auto& [cls, count] : it.selected_per_class) {
            per_class += (per_class.empty() ? "" : ",") + std::string(to_string(cls)) + ":" + std::to_string(count);
        }
        out << "selected_per_class," << per_class << '\n';
        std::vector<std::string> ids;
        for (Index j : it.selected) {
            ids.push_back(d.predictor_ids[static_cast<std::size_t>(j)]);
        }
        out << "selected," << join(ids, ';') << '\n';
    }
}

std::string cv_type_label(const CVReport& report, Thinning thinning)
{
    switch (report.mode) {
    case CVMode::Holdout: return "Holdout validation";
    case CVMode::Naive: return thinning == Thinning::None ? "Leave-one-out CV" : "Naive leave-one-out CV";
    case CVMode::Proper: return thinning == Thinning::None ? "Leave-one-out CV" : "Two-deep CV";
    }
    return "?";
}

void write_cv_report(std::ostream& out, const CVReport& r)
{
    out << "# cross-validation report\n";
    out << "mode = " << to_string(r.mode) << '\n';
    out << "model = " << r.model_description << '\n';
    out << "classes = " << r.classes << '\n';
    out << "criterion = " << to_string(r.criterion) << '\n';
    out << "n_predictors = " << r.n_predictors << '\n';
    out << "compounds = " << r.compounds() << '\n';
    out << "tp = " << r.tp << '\n';
    out << "fn = " << r.fn << '\n';
    out << "tn = " << r.tn << '\n';
    out << "fp = " << r.fp << '\n';
    out << "correct_pct = " << text::format_fixed(text::round_half_up_2(r.correct_pct), 2) << '\n';
    out << "sensitivity_pct = " << pct_or_na(r.sensitivity_pct) << '\n';
    out << "specificity_pct = " << pct_or_na(r.specificity_pct) << '\n';
    out << "holdout_reads_before_prediction = " << r.total_holdout_reads() << '\n';
    out << "\n[per_compound]\n";
    out << "id,true,score,predicted,k_star,n_predictors,holdout_reads\n";
    for (const auto& c : r.per_compound) {
        out << c.id << ',' << c.truth << ',' << format_exact(c.score) << ',' << c.predicted << ','
            << format_exact(c.k_star) << ',' << c.n_predictors << ',' << c.holdout_reads << '\n';
    }
}

CVReport read_cv_report(std::istream& in)
{
    const auto p = parse_report(in);
    CVReport r;
    const auto& mode = require(p, "mode");
    if (mode == "naive") {
        r.mode = CVMode::Naive;
    } else if (mode == "proper") {
        r.mode = CVMode::Proper;
    } else if (mode == "holdout") {
        r.mode = CVMode::Holdout;
    } else {
        throw ValidationError("report: unknown mode '" + mode + "'");
    }
    r.model_description = require(p, "model");
    r.classes = require(p, "classes");
    r.criterion = require(p, "criterion") == "gcv" ? RidgeCriterion::GCV : RidgeCriterion::PRESS;
    r.n_predictors = require_index(p, "n_predictors");
    auto it = p.sections.find("per_compound");
    if (it == p.sections.end()) {
        throw ValidationError("report: missing [per_compound] section");
    }
    for (std::size_t l = 1; l < it->second.size(); ++l) {
        const auto cells = text::split(it->second[l], ',');
        if (cells.size() != 7) {
            throw ValidationError("report: malformed per-compound row '" + it->second[l] + "'");
        }
        CompoundResult c;
        long long truth = 0, predicted = 0, n_pred = 0, reads = 0;
        if (!text::parse_int(cells[1], truth) || !text::parse_double(cells[2], c.score) ||
            !text::parse_int(cells[3], predicted) || !text::parse_double(cells[4], c.k_star) ||
            !text::parse_int(cells[5], n_pred) || !text::parse_int(cells[6], reads)) {
            throw ValidationError("report: malformed per-compound row '" + it->second[l] + "'");
        }
        c.id = std::string(cells[0]);
        c.truth = static_cast<int>(truth);
        c.predicted = static_cast<int>(predicted);
        c.n_predictors = static_cast<Index>(n_pred);
        c.holdout_reads = static_cast<Index>(reads);
        r.per_compound.push_back(std::move(c));
    }
    compute_metrics(r);
    return r;
}

std::string summary_header()
{
    return "Type of predictors in model\tModel description\tNo. of predictors\tType of cross validation\t"
           "Correct classification %\tSensitivity\tSpecificity";
}

std::string summary_row(const CVReport& r, const std::string& cv_type)
{
    return r.classes + '\t' + r.model_description + '\t' + std::to_string(r.n_predictors) + '\t' + cv_type + '\t' +
           text::format_fixed(text::round_half_up_2(r.correct_pct), 2) + '\t' + pct_or_na(r.sensitivity_pct) + '\t' +
           pct_or_na(r.specificity_pct);
}

FitArtifact make_fit_artifact(const FittedModel& model, const RidgeSearchConfig& search)
{
    FitArtifact a;
    a.predictor_ids = model.predictor_ids;
    a.classes = model.predictor_classes;
    a.fit = model.fit;
    a.criterion = model.criterion;
    a.cutoff = model.cutoff;
    a.grid = search.grid;
    a.curve = model.selection.curve;
    return a;
}

void write_fit_artifact(std::ostream& out, const FitArtifact& a)
{
    const auto& f = a.fit;
    out << "# ridge fit\n";
    out << "criterion = " << to_string(a.criterion) << '\n';
    out << "ridge_constant = " << format_exact(f.ridge_constant) << '\n';
    out << "cutoff = " << format_exact(a.cutoff) << '\n';
    out << "predictors = " << a.predictor_ids.size() << '\n';
    out << "compounds = " << f.hat_diagonal.size() << '\n';
    out << "response_mean = " << format_exact(f.standardization.response_mean) << '\n';
    out << "response_sd = " << format_exact(f.standardization.response_sd) << '\n';
    out << "hat_trace = " << format_exact(f.hat_trace) << '\n';
    out << "rss = " << format_exact(f.rss) << '\n';
    out << "sigma2_hat = " << (std::isfinite(f.sigma2_hat) ? format_exact(f.sigma2_hat) : "NA") << '\n';
    out << "\n[coefficients]\n";
    out << "predictor_id,class,coefficient,t_ratio,mean,sd\n";
    for (std::size_t j = 0; j < a.predictor_ids.size(); ++j) {
        const auto jj = static_cast<Index>(j);
        out << a.predictor_ids[j] << ',' << to_string(a.classes[j]) << ',' << format_exact(f.coefficients(jj)) << ','
            << (f.t_ratios.size() ? format_exact(f.t_ratios(jj)) : "NA") << ','
            << format_exact(f.standardization.means(jj)) << ',' << format_exact(f.standardization.sds(jj)) << '\n';
    }
    out << "\n[criterion_curve]\n";
    out << "k,value\n";
    for (std::size_t i = 0; i < a.grid.size() && i < a.curve.size(); ++i) {
        out << format_exact(a.grid[i]) << ',' << (std::isfinite(a.curve[i]) ? format_exact(a.curve[i]) : "NA") << '\n';
    }
}

FitArtifact read_fit_artifact(std::istream& in)
{
    const auto p = parse_report(in);
    FitArtifact a;
    a.criterion = require(p, "criterion") == "gcv" ? RidgeCriterion::GCV : RidgeCriterion::PRESS;
    a.fit.ridge_constant = require_double(p, "ridge_constant");
    a.cutoff = require_double(p, "cutoff");
    a.fit.standardization.response_mean = require_double(p, "response_mean");
    a.fit.standardization.response_sd = require_double(p, "response_sd");
    a.fit.hat_trace = require_double(p, "hat_trace");
    a.fit.rss = require_double(p, "rss");
    const Index n = require_index(p, "predictors");

    auto it = p.sections.find("coefficients");
    if (it == p.sections.end() || static_cast<Index>(it->second.size()) != n + 1) {
        throw ValidationError("fit artifact: [coefficients] must list " + std::to_string(n) + " predictors");
    }
    a.fit.coefficients.resize(n);
    a.fit.t_ratios.resize(n);
    a.fit.standardization.means.resize(n);
    a.fit.standardization.sds.resize(n);
    bool have_t = true;
    for (Index j = 0; j < n; ++j) {
        const auto& row = it->second[static_cast<std::size_t>(j + 1)];
        const auto cells = text::split(row, ',');
        if (cells.size() != 6) {
            throw ValidationError("fit artifact: malformed coefficient row '" + row + "'");
        }
        auto cls = parse_predictor_class(cells[1]);
        double b = 0, t = 0, mean = 0, sd = 0;
        if (!cls || !text::parse_double(cells[2], b) || !text::parse_double(cells[4], mean) ||
            !text::parse_double(cells[5], sd) || !(sd > 0.0)) {
            throw ValidationError("fit artifact: malformed coefficient row '" + row + "'");
        }
        if (!text::parse_double(cells[3], t)) {
            have_t = false;
        }
        a.predictor_ids.emplace_back(text::trim(cells[0]));
        a.classes.push_back(*cls);
        a.fit.coefficients(j) = b;
        a.fit.t_ratios(j) = t;
        a.fit.standardization.means(j) = mean;
        a.fit.standardization.sds(j) = sd;
    }
    if (!have_t) {
        a.fit.t_ratios.resize(0);
    }
    if (auto c = p.sections.find("criterion_curve"); c != p.sections.end()) {
        for (std::size_t l = 1; l < c->second.size(); ++l) {
            const auto cells = text::split(c->second[l], ',');
            double k = 0, v = std::numeric_limits<double>::quiet_NaN();
            if (cells.size() != 2 || !text::parse_double(cells[0], k)) {
                throw ValidationError("fit artifact: malformed curve row '" + c->second[l] + "'");
            }
            text::parse_double(cells[1], v);
            a.grid.push_back(k);
            a.curve.push_back(v);
        }
    }
    return a;
}

std::vector<SignificantPredictor> significant_predictors(const FitArtifact& a, double threshold)
{
    std::vector<SignificantPredictor> rows;
    for (Index j = 0; j < a.fit.t_ratios.size(); ++j) {
        const double t = std::fabs(a.fit.t_ratios(j));
        if (t >= threshold) {
            rows.push_back({a.predictor_ids[static_cast<std::size_t>(j)], t, a.classes[static_cast<std::size_t>(j)]});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.abs_t > y.abs_t; });
    return rows;
}

void write_significance_table(std::ostream& out, const std::vector<SignificantPredictor>& rows)
{
    out << "Descriptor name\t|t|-ratio\tDescriptor class\n";
    for (const auto& r : rows) {
        out << r.id << '\t' << text::format_fixed(r.abs_t, 4) << '\t' << to_string(r.cls) << '\n';
    }
}

} // namespace itcr
