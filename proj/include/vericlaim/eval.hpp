#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vericlaim/corpus.hpp"
#include "vericlaim/detect.hpp"
#include "vericlaim/errors.hpp"

namespace vericlaim {

// A statistic whose defining formula has no value on this input (zero-variance
// differences, chance agreement of 1).
class DegenerateStatistic : public Error {
public:
    explicit DegenerateStatistic(const std::string& msg) : Error(msg) {}
};

// Positive class is verifiable throughout.
struct ConfusionMatrix {
    size_t tp = 0;
    size_t fp = 0;
    size_t fn = 0;
    size_t tn = 0;

    size_t total() const { return tp + fp + fn + tn; }
};

struct MetricReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> fp_fn_ratio; // unset when fn == 0
};

// Table-style error breakdown: counts with their shares of n.
struct ErrorDistribution {
    size_t n = 0;
    size_t fp = 0;
    size_t fn = 0;
    size_t total_errors = 0;
    double fp_share = 0.0;
    double fn_share = 0.0;
    double total_share = 0.0;
    std::optional<double> fp_fn_ratio;
};

// Per-sample alignment of two systems against gold; the four categories
// partition the aligned set.
struct TransitionReport {
    size_t n = 0;
    size_t fixed = 0;      // baseline wrong, system right
    size_t regressed = 0;  // baseline right, system wrong
    size_t both_right = 0;
    size_t both_wrong = 0;
    long net_fp_delta = 0; // system fp - baseline fp
    long net_fn_delta = 0;
};

struct DeltaEntry {
    std::string metric;
    double delta = 0.0; // percentage points, b - a
    bool flagged = false;
};

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    size_t dof = 0;
};

// Complete items x raters matrix for one rating dimension.
struct RatingsTable {
    std::vector<std::string> item_ids;
    std::vector<std::string> rater_ids;
    std::vector<std::vector<int>> ratings; // [item][rater]

    size_t items() const { return item_ids.size(); }
    size_t raters() const { return rater_ids.size(); }
    // Throws unless the matrix is complete and every cell is on the scale.
    void validate(const std::set<int>& scale = {1, 2, 3}) const;
    std::vector<double> item_means() const;
    double mean() const;
};

ConfusionMatrix confusion(const std::vector<Prediction>& preds, const std::vector<Claim>& gold);

// Verifiable is the positive class; f1 is the verifiable-class score.
MetricReport metrics(const ConfusionMatrix& cm);

// Mean of the per-class F1 scores, for readers who want the macro view.
double macro_f1(const ConfusionMatrix& cm);

ErrorDistribution error_distribution(const ConfusionMatrix& cm);

TransitionReport transitions(const std::vector<Prediction>& baseline,
                             const std::vector<Prediction>& system,
                             const std::vector<Claim>& gold);

// Deltas in percentage points (b - a) for accuracy/precision/recall/f1;
// flagged when |delta| exceeds the threshold strictly.
std::vector<DeltaEntry> delta_table(const MetricReport& a, const MetricReport& b,
                                    double flag_threshold = 3.5);

// Fleiss' kappa over the observed categories. Perfect agreement with chance
// agreement below 1 yields exactly 1; chance agreement of 1 is degenerate.
double fleiss_kappa(const RatingsTable& table);

// Two-sided paired t-test; p comes from the t CDF evaluated through the
// regularized incomplete beta.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) via continued fraction; exposed for
// the statistics above.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double dof);

// CSV with header item_id,rater_id,dimension,rating -> one table per
// dimension, rows/columns in first-appearance order.
std::map<std::string, RatingsTable> read_ratings_csv(const std::filesystem::path& path);

double round_to(double value, int decimals);

nlohmann::json to_json_report(const MetricReport& m);
nlohmann::json to_json_report(const ErrorDistribution& e);
nlohmann::json to_json_report(const TransitionReport& t);
nlohmann::json to_json_report(const std::vector<DeltaEntry>& deltas);

} // namespace vericlaim
