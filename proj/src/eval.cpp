#include "vericlaim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "vericlaim/text.hpp"

namespace vericlaim {

void RatingsTable::validate(const std::set<int>& scale) const {
    if (raters() < 2) throw ConfigError("ratings table needs at least 2 raters");
    if (items() < 2) throw ConfigError("ratings table needs at least 2 items");
    if (ratings.size() != items()) throw ConfigError("ratings row count mismatch");
    for (size_t i = 0; i < items(); ++i) {
        if (ratings[i].size() != raters()) {
            throw ConfigError("incomplete ratings for item " + item_ids[i]);
        }
        for (int r : ratings[i]) {
            if (!scale.count(r)) {
                throw ConfigError("rating " + std::to_string(r) + " for item " + item_ids[i] +
                                  " is off the scale");
            }
        }
    }
}

std::vector<double> RatingsTable::item_means() const {
    std::vector<double> means;
    means.reserve(items());
    for (const auto& row : ratings) {
        double sum = 0.0;
        for (int r : row) sum += r;
        means.push_back(sum / static_cast<double>(row.size()));
    }
    return means;
}

double RatingsTable::mean() const {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& row : ratings) {
        for (int r : row) {
            sum += r;
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

namespace {

std::unordered_map<std::string, Label> gold_by_id(const std::vector<Claim>& gold) {
    std::unordered_map<std::string, Label> map;
    for (const auto& c : gold) {
        if (!c.gold_label) throw ConfigError("gold claim without label: " + c.id);
        if (!map.emplace(c.id, *c.gold_label).second) {
            throw ConfigError("duplicate gold id: " + c.id);
        }
    }
    return map;
}

std::unordered_map<std::string, Label> preds_by_id(const std::vector<Prediction>& preds) {
    std::unordered_map<std::string, Label> map;
    for (const auto& p : preds) {
        if (!map.emplace(p.claim_id, p.label).second) {
            throw ConfigError("duplicate prediction id: " + p.claim_id);
        }
    }
    return map;
}

} // namespace

ConfusionMatrix confusion(const std::vector<Prediction>& preds, const std::vector<Claim>& gold) {
    auto gold_map = gold_by_id(gold);
    auto pred_map = preds_by_id(preds);
    if (gold_map.size() != pred_map.size()) {
        throw ConfigError("prediction/gold id sets differ in size: " +
                          std::to_string(pred_map.size()) + " vs " +
                          std::to_string(gold_map.size()));
    }
    ConfusionMatrix cm;
    for (const auto& [id, truth] : gold_map) {
        auto it = pred_map.find(id);
        if (it == pred_map.end()) throw ConfigError("no prediction for gold id: " + id);
        bool pred_pos = it->second == Label::verifiable;
        bool gold_pos = truth == Label::verifiable;
        if (pred_pos && gold_pos) ++cm.tp;
        else if (pred_pos && !gold_pos) ++cm.fp;
        else if (!pred_pos && gold_pos) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricReport metrics(const ConfusionMatrix& cm) {
    size_t n = cm.total();
    if (n == 0) throw ConfigError("empty confusion matrix");
    MetricReport m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
    m.precision = (cm.tp + cm.fp) > 0
                      ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                      : 0.0;
    m.recall = (cm.tp + cm.fn) > 0
                   ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)
                   : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                          : 0.0;
    if (cm.fn > 0) m.fp_fn_ratio = static_cast<double>(cm.fp) / static_cast<double>(cm.fn);
    return m;
}

double macro_f1(const ConfusionMatrix& cm) {
    auto class_f1 = [](size_t tp, size_t fp, size_t fn) {
        double p = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
        double r = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
        return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    };
    // Swapping the positive class turns tn into tp and transposes fp/fn.
    return (class_f1(cm.tp, cm.fp, cm.fn) + class_f1(cm.tn, cm.fn, cm.fp)) / 2.0;
}

ErrorDistribution error_distribution(const ConfusionMatrix& cm) {
    ErrorDistribution e;
    e.n = cm.total();
    if (e.n == 0) throw ConfigError("empty confusion matrix");
    e.fp = cm.fp;
    e.fn = cm.fn;
    e.total_errors = cm.fp + cm.fn;
    e.fp_share = static_cast<double>(cm.fp) / static_cast<double>(e.n);
    e.fn_share = static_cast<double>(cm.fn) / static_cast<double>(e.n);
    e.total_share = static_cast<double>(e.total_errors) / static_cast<double>(e.n);
    if (cm.fn > 0) e.fp_fn_ratio = static_cast<double>(cm.fp) / static_cast<double>(cm.fn);
    return e;
}

TransitionReport transitions(const std::vector<Prediction>& baseline,
                             const std::vector<Prediction>& system,
                             const std::vector<Claim>& gold) {
    auto gold_map = gold_by_id(gold);
    auto base_map = preds_by_id(baseline);
    auto sys_map = preds_by_id(system);
    if (base_map.size() != gold_map.size() || sys_map.size() != gold_map.size()) {
        throw ConfigError("transition analysis needs aligned id sets");
    }
    TransitionReport report;
    long base_fp = 0, base_fn = 0, sys_fp = 0, sys_fn = 0;
    for (const auto& [id, truth] : gold_map) {
        auto bit = base_map.find(id);
        auto sit = sys_map.find(id);
        if (bit == base_map.end() || sit == sys_map.end()) {
            throw ConfigError("prediction missing for id: " + id);
        }
        bool base_right = bit->second == truth;
        bool sys_right = sit->second == truth;
        if (!base_right && sys_right) ++report.fixed;
        else if (base_right && !sys_right) ++report.regressed;
        else if (base_right && sys_right) ++report.both_right;
        else ++report.both_wrong;

        bool gold_pos = truth == Label::verifiable;
        if (bit->second == Label::verifiable && !gold_pos) ++base_fp;
        if (bit->second == Label::non_verifiable && gold_pos) ++base_fn;
        if (sit->second == Label::verifiable && !gold_pos) ++sys_fp;
        if (sit->second == Label::non_verifiable && gold_pos) ++sys_fn;
    }
    report.n = gold_map.size();
    report.net_fp_delta = sys_fp - base_fp;
    report.net_fn_delta = sys_fn - base_fn;
    return report;
}

std::vector<DeltaEntry> delta_table(const MetricReport& a, const MetricReport& b,
                                    double flag_threshold) {
    auto entry = [&](const std::string& name, double va, double vb) {
        DeltaEntry e;
        e.metric = name;
        e.delta = (vb - va) * 100.0;
        e.flagged = std::abs(e.delta) > flag_threshold;
        return e;
    };
    return {
        entry("accuracy", a.accuracy, b.accuracy),
        entry("precision", a.precision, b.precision),
        entry("recall", a.recall, b.recall),
        entry("f1", a.f1, b.f1),
    };
}

double fleiss_kappa(const RatingsTable& table) {
    if (table.raters() < 2) throw ConfigError("fleiss_kappa needs at least 2 raters");
    if (table.items() < 2) throw ConfigError("fleiss_kappa needs at least 2 items");

    std::set<int> categories;
    for (const auto& row : table.ratings) categories.insert(row.begin(), row.end());

    const double n = static_cast<double>(table.raters());
    const double N = static_cast<double>(table.items());

    // Per-item agreement P_i and per-category marginals p_j.
    double p_bar = 0.0;
    std::map<int, double> marginal;
    for (const auto& row : table.ratings) {
        if (row.size() != table.raters()) throw ConfigError("incomplete ratings table");
        std::map<int, double> counts;
        for (int r : row) counts[r] += 1.0;
        double agree = 0.0;
        for (const auto& [cat, c] : counts) {
            agree += c * (c - 1.0);
            marginal[cat] += c;
        }
        p_bar += agree / (n * (n - 1.0));
    }
    p_bar /= N;

    double pe_bar = 0.0;
    for (auto& [cat, total] : marginal) {
        double share = total / (N * n);
        pe_bar += share * share;
    }

    if (1.0 - pe_bar <= 0.0) {
        throw DegenerateStatistic("fleiss_kappa undefined: chance agreement is 1");
    }
    return (p_bar - pe_bar) / (1.0 - pe_bar);
}

// ---------------------------------------------------------------------------
// t distribution via the regularized incomplete beta
// ---------------------------------------------------------------------------

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Lentz's continued fraction for the incomplete beta.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    double x = dof / (dof + t * t);
    return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("paired t-test needs equal-length samples");
    if (a.size() < 2) throw ConfigError("paired t-test needs at least 2 pairs");
    size_t n = a.size();
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    double variance = ss / static_cast<double>(n - 1);
    if (variance <= 0.0) {
        throw DegenerateStatistic(mean == 0.0
                                      ? "paired t-test degenerate: samples are identical"
                                      : "paired t-test degenerate: zero-variance differences");
    }
    TTestResult result;
    result.dof = n - 1;
    result.t = mean / std::sqrt(variance / static_cast<double>(n));
    result.p = student_t_two_sided_p(result.t, static_cast<double>(result.dof));
    return result;
}

std::map<std::string, RatingsTable> read_ratings_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("ratings file not found: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty ratings file: " + path.string());

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        out.push_back(trim(cur));
        return out;
    };

    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line);
    auto col = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        throw IoError("ratings file missing column '" + name + "'");
    };
    int item_col = col("item_id"), rater_col = col("rater_id");
    int dim_col = col("dimension"), rating_col = col("rating");
    size_t needed = static_cast<size_t>(std::max({item_col, rater_col, dim_col, rating_col})) + 1;

    struct Builder {
        std::vector<std::string> items, raters;
        std::map<std::pair<std::string, std::string>, int> cells;
    };
    std::map<std::string, Builder> builders;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (fields.size() < needed) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": too few columns");
        }
        auto& b = builders[fields[static_cast<size_t>(dim_col)]];
        const auto& item = fields[static_cast<size_t>(item_col)];
        const auto& rater = fields[static_cast<size_t>(rater_col)];
        int rating;
        try {
            rating = std::stoi(fields[static_cast<size_t>(rating_col)]);
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad rating value");
        }
        if (std::find(b.items.begin(), b.items.end(), item) == b.items.end()) b.items.push_back(item);
        if (std::find(b.raters.begin(), b.raters.end(), rater) == b.raters.end()) {
            b.raters.push_back(rater);
        }
        if (!b.cells.emplace(std::make_pair(item, rater), rating).second) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": duplicate rating for (" +
                          item + ", " + rater + ")");
        }
    }

    std::map<std::string, RatingsTable> tables;
    for (auto& [dimension, b] : builders) {
        RatingsTable t;
        t.item_ids = b.items;
        t.rater_ids = b.raters;
        for (const auto& item : b.items) {
            std::vector<int> row;
            for (const auto& rater : b.raters) {
                auto it = b.cells.find({item, rater});
                if (it == b.cells.end()) {
                    throw IoError("ratings for dimension '" + dimension + "' incomplete: item " +
                                  item + " missing rater " + rater);
                }
                row.push_back(it->second);
            }
            t.ratings.push_back(std::move(row));
        }
        tables.emplace(dimension, std::move(t));
    }
    return tables;
}

double round_to(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

nlohmann::json to_json_report(const MetricReport& m) {
    nlohmann::json j = {{"accuracy", m.accuracy},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"accuracy_pct", round_to(m.accuracy * 100.0, 2)},
                        {"precision_pct", round_to(m.precision * 100.0, 2)},
                        {"recall_pct", round_to(m.recall * 100.0, 2)},
                        {"f1_pct", round_to(m.f1 * 100.0, 2)}};
    j["fp_fn_ratio"] = m.fp_fn_ratio ? nlohmann::json(round_to(*m.fp_fn_ratio, 2))
                                     : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json_report(const ErrorDistribution& e) {
    nlohmann::json j = {{"n", e.n},
                        {"fp", e.fp},
                        {"fn", e.fn},
                        {"total_errors", e.total_errors},
                        {"fp_pct", round_to(e.fp_share * 100.0, 1)},
                        {"fn_pct", round_to(e.fn_share * 100.0, 1)},
                        {"total_pct", round_to(e.total_share * 100.0, 1)}};
    j["fp_fn_ratio"] = e.fp_fn_ratio ? nlohmann::json(round_to(*e.fp_fn_ratio, 2))
                                     : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json_report(const TransitionReport& t) {
    return {{"n", t.n},
            {"fixed", t.fixed},
            {"regressed", t.regressed},
            {"both_right", t.both_right},
            {"both_wrong", t.both_wrong},
            {"net_fp_delta", t.net_fp_delta},
            {"net_fn_delta", t.net_fn_delta}};
}

nlohmann::json to_json_report(const std::vector<DeltaEntry>& deltas) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : deltas) {
        j.push_back({{"metric", d.metric}, {"delta", d.delta}, {"flagged", d.flagged}});
    }
    return j;
}

} // namespace vericlaim
