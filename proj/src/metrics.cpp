#include "cfmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfmimo {

double jain_fairness(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("jain_fairness: empty vector");
  const double sum = values.sum();
  const double sum_sq = values.squaredNorm();
  if (sum_sq == 0.0) return 1.0;  // all-zero: perfectly uniform
  return sum * sum / (n * sum_sq);
}

double outage_quantile(Eigen::VectorXd values, double q) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("outage_quantile: empty vector");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("outage_quantile: q outside [0,1]");
  std::sort(values.data(), values.data() + n);
  if (n == 1) return values(0);
  const double pos = q * (n - 1);
  const int lo = static_cast<int>(std::floor(pos));
  const int hi = std::min(lo + 1, n - 1);
  const double frac = pos - lo;
  return values(lo) + frac * (values(hi) - values(lo));
}

CountStats count_stats(const std::vector<int>& counts) {
  CountStats cs;
  if (counts.empty()) return cs;
  double sum = 0.0;
  int mn = counts[0], mx = counts[0];
  for (int c : counts) {
    sum += c;
    mn = std::min(mn, c);
    mx = std::max(mx, c);
  }
  cs.mean = sum / counts.size();
  cs.min = mn;
  cs.max = mx;
  return cs;
}

SchemeSetupStats aggregate(const Association& assoc,
                           const FronthaulReport& fronthaul,
                           const SeResult& se_result,
                           double assoc_time_us_per_ue, int num_aps,
                           int num_cpus) {
  const int K = assoc.num_ues();
  SchemeSetupStats st;
  st.se = se_result.se;
  st.se_mean = se_result.se.size() > 0 ? se_result.se.mean() : 0.0;
  st.jain = jain_fairness(se_result.se);
  st.outage5 = outage_quantile(se_result.se, 0.05);
  st.load_scalars = fronthaul.intercpu_load_scalars;
  st.assoc_time_us_per_ue = assoc_time_us_per_ue;
  st.signal_stderr_mean = se_result.signal_stderr.size() > 0
                              ? se_result.signal_stderr.mean()
                              : 0.0;

  std::vector<int> aps_per_ue(K, 0), ues_per_ap(num_aps, 0);
  for (int k = 0; k < K; ++k) {
    aps_per_ue[k] = static_cast<int>(assoc.entries[k].serving_aps.size());
    for (int ap : assoc.entries[k].serving_aps) ++ues_per_ap[ap];
    st.degenerate_zscores += assoc.entries[k].degenerate_zscore;
  }
  std::vector<int> touched(num_cpus, 0), mastered(num_cpus, 0);
  for (int u = 0; u < num_cpus; ++u) {
    touched[u] = static_cast<int>(fronthaul.ues_touched[u].size());
    mastered[u] = static_cast<int>(fronthaul.ues_mastered[u].size());
  }
  st.aps_per_ue = count_stats(aps_per_ue);
  st.ues_per_ap = count_stats(ues_per_ap);
  st.ues_per_cpu_touched = count_stats(touched);
  st.ues_per_cpu_master = count_stats(mastered);
  return st;
}

SchemeReport reduce_setups(Scheme scheme,
                           const std::vector<SchemeSetupStats>& per_setup) {
  if (per_setup.empty()) throw std::invalid_argument("reduce_setups: no setups");
  SchemeReport rep;
  rep.scheme = scheme;
  const int s = static_cast<int>(per_setup.size());

  auto merge_counts = [](CountStats& into, const CountStats& from, int n) {
    into.mean += from.mean / n;
    into.min = std::min(into.min, from.min);
    into.max = std::max(into.max, from.max);
  };
  rep.aps_per_ue.min = rep.ues_per_ap.min = rep.ues_per_cpu_touched.min =
      rep.ues_per_cpu_master.min = std::numeric_limits<double>::infinity();

  for (const SchemeSetupStats& st : per_setup) {
    rep.se_mean += st.se_mean / s;
    rep.jain_mean += st.jain / s;
    rep.load_mean += static_cast<double>(st.load_scalars) / s;
    rep.assoc_time_us_per_ue += st.assoc_time_us_per_ue / s;
    rep.signal_stderr_mean += st.signal_stderr_mean / s;
    rep.precoder_fallbacks += st.precoder_fallbacks;
    rep.degenerate_zscores += st.degenerate_zscores;
    merge_counts(rep.aps_per_ue, st.aps_per_ue, s);
    merge_counts(rep.ues_per_ap, st.ues_per_ap, s);
    merge_counts(rep.ues_per_cpu_touched, st.ues_per_cpu_touched, s);
    merge_counts(rep.ues_per_cpu_master, st.ues_per_cpu_master, s);

    rep.load_per_setup.push_back(static_cast<double>(st.load_scalars));
    rep.jain_per_setup.push_back(st.jain);
    rep.se_mean_per_setup.push_back(st.se_mean);
    rep.assoc_time_per_setup.push_back(st.assoc_time_us_per_ue);
    for (int i = 0; i < st.se.size(); ++i) rep.se_cdf.push_back(st.se(i));
  }
  std::sort(rep.se_cdf.begin(), rep.se_cdf.end());
  const std::size_t n = rep.se_cdf.size();
  rep.se_median = n % 2 == 1
                      ? rep.se_cdf[n / 2]
                      : 0.5 * (rep.se_cdf[n / 2 - 1] + rep.se_cdf[n / 2]);
  Eigen::VectorXd pooled =
      Eigen::Map<const Eigen::VectorXd>(rep.se_cdf.data(), n);
  rep.outage5 = outage_quantile(pooled, 0.05);
  return rep;
}

const SchemeReport& RunReport::scheme(Scheme s) const {
  for (const SchemeReport& rep : schemes) {
    if (rep.scheme == s) return rep;
  }
  throw std::out_of_range("RunReport: scheme not present: " + scheme_name(s));
}

}  // namespace cfmimo
