#include "gsi/report_io.hpp"

#include <ostream>

#include "gsi/error.hpp"
#include "gsi/format.hpp"

namespace gsi {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
  return m == Metric::MAE ? "mae" : "nrmse";
}

std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "mae" || s == "MAE") return Metric::MAE;
  if (s == "nrmse" || s == "NRMSE") return Metric::NRMSE;
  return std::nullopt;
}

ordered_json report_to_json(const EvaluationReport& report, const ReportMeta& meta) {
  ordered_json j;
  j["schema"] = "gsi-evaluation-report";
  j["schema_version"] = kReportSchemaVersion;
  if (meta.generated_at) j["generated_at"] = *meta.generated_at;
  j["dataset"] = meta.dataset;
  j["seed"] = meta.seed ? ordered_json(*meta.seed) : ordered_json(nullptr);
  j["nrmse_normalizer"] = "population_std_of_truth";
  j["estimators"] = report.estimators;

  auto label = [](const std::vector<std::string>& labels, Index i) {
    return i < labels.size() ? ordered_json(labels[i]) : ordered_json(nullptr);
  };
  ordered_json records = ordered_json::array();
  for (const auto& r : report.per_target) {
    ordered_json rec;
    rec["a_index"] = r.target.a;
    rec["b_index"] = r.target.b;
    rec["a_label"] = label(meta.a_labels, r.target.a);
    rec["b_label"] = label(meta.b_labels, r.target.b);
    rec["estimator"] = r.estimator;
    rec["status"] = r.status;
    rec["scale"] = r.standardized ? "standardized" : "original";
    rec["mae"] = optional_number(r.mae);
    rec["nrmse"] = optional_number(r.nrmse);
    records.push_back(std::move(rec));
  }
  j["per_target"] = std::move(records);

  ordered_json aggs = ordered_json::array();
  for (const auto& a : report.aggregates) {
    ordered_json rec;
    rec["estimator"] = a.estimator;
    rec["metric"] = to_string(a.metric);
    rec["count"] = a.count;
    rec["failures"] = a.failures;
    if (a.count > 0) {
      rec["mean"] = a.mean;
      rec["median"] = a.median;
      rec["std"] = a.std;
    } else {
      rec["mean"] = rec["median"] = rec["std"] = nullptr;
    }
    aggs.push_back(std::move(rec));
  }
  j["aggregates"] = std::move(aggs);

  ordered_json cmps = ordered_json::array();
  for (const auto& c : report.comparisons) {
    ordered_json rec;
    rec["estimator_a"] = c.estimator_a;
    rec["estimator_b"] = c.estimator_b;
    rec["metric"] = to_string(c.metric);
    rec["test"] = c.test;
    rec["alternative"] = to_string(c.alternative);
    rec["n_pairs"] = c.n_pairs;
    rec["n_nonzero"] = c.result.n;
    rec["statistic"] = c.result.statistic;
    rec["p_value"] = c.result.p_value;
    rec["exact"] = c.result.exact;
    cmps.push_back(std::move(rec));
  }
  j["comparisons"] = std::move(cmps);
  return j;
}

EvaluationReport report_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != "gsi-evaluation-report" ||
        j.at("schema_version").get<int>() != kReportSchemaVersion) {
      fail(ErrorKind::ParseError, "unsupported report schema");
    }
    EvaluationReport rep;
    rep.estimators = j.at("estimators").get<std::vector<std::string>>();
    const auto& recs = j.at("per_target");
    const std::size_t ne = rep.estimators.size();
    if (ne == 0 || recs.size() % ne != 0) {
      fail(ErrorKind::ParseError, "per_target size is not a multiple of estimator count");
    }
    for (std::size_t r = 0; r < recs.size(); ++r) {
      const auto& jr = recs[r];
      TargetRecord tr;
      tr.target = {jr.at("a_index").get<Index>(), jr.at("b_index").get<Index>()};
      tr.estimator = jr.at("estimator").get<std::string>();
      tr.status = jr.at("status").get<std::string>();
      tr.standardized = jr.at("scale").get<std::string>() == "standardized";
      tr.mae = read_optional(jr, "mae");
      tr.nrmse = read_optional(jr, "nrmse");
      if (tr.estimator != rep.estimators[r % ne]) {
        fail(ErrorKind::ParseError, "per_target records are not target-major");
      }
      if (r % ne == 0) rep.targets.push_back(tr.target);
      rep.per_target.push_back(std::move(tr));
    }
    for (const auto& jc : j.at("comparisons")) {
      Comparison c;
      c.estimator_a = jc.at("estimator_a").get<std::string>();
      c.estimator_b = jc.at("estimator_b").get<std::string>();
      c.metric = parse_metric(jc.at("metric").get<std::string>()).value_or(Metric::NRMSE);
      c.test = jc.at("test").get<std::string>();
      c.alternative =
          parse_alternative(jc.at("alternative").get<std::string>()).value_or(Alternative::TwoSided);
      c.n_pairs = jc.at("n_pairs").get<std::size_t>();
      c.result.n = jc.at("n_nonzero").get<std::size_t>();
      c.result.statistic = jc.at("statistic").get<double>();
      c.result.p_value = jc.at("p_value").get<double>();
      c.result.exact = jc.at("exact").get<bool>();
      rep.comparisons.push_back(std::move(c));
    }
    compute_aggregates(rep);
    return rep;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed report: ") + e.what());
  }
}

void write_metric_columns(std::ostream& out, const EvaluationReport& report,
                          Metric metric) {
  out << "a_index,b_index";
  for (const auto& e : report.estimators) out << ",\"" << e << '"';
  out << '\n';
  for (std::size_t t = 0; t < report.targets.size(); ++t) {
    out << report.targets[t].a << ',' << report.targets[t].b;
    for (std::size_t e = 0; e < report.estimators.size(); ++e) {
      out << ',';
      if (auto v = report.record(t, e).metric(metric)) out << format_double(*v);
    }
    out << '\n';
  }
}

ordered_json synthetic_truth_json(const SyntheticInstance& inst,
                                  const std::vector<std::string>& a_labels,
                                  const std::vector<std::string>& b_labels) {
  const auto& s = inst.spec;
  ordered_json j;
  j["model"] = s.model == LatentModel::MultiLatent ? "multi" : "single";
  j["n_a"] = s.n_a;
  j["n_b"] = s.n_b;
  j["dim"] = s.dim;
  j["rank"] = s.rank;
  j["noise_std"] = s.noise_std;
  j["missing_fraction"] = s.missing_fraction;
  j["seed"] = s.seed;
  j["a_labels"] = a_labels;
  j["b_labels"] = b_labels;
  j["layout"] = {{"u_factors", "[i][d][r]"}, {"v_factors", "[j][d][r]"},
                 {"clean", "[i][j][d]"}};
  j["u_factors"] = inst.u_factors;
  j["v_factors"] = inst.v_factors;
  j["clean"] = inst.clean;
  return j;
}

}  // namespace gsi
