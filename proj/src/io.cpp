#include "cfmimo/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cfmimo {
namespace {

using Json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Json config_to_json(const ScenarioConfig& c) {
  Json j;
  j["num_ues"] = c.num_ues;
  j["num_aps"] = c.num_aps;
  j["antennas_per_ap"] = c.antennas_per_ap;
  j["num_cpus"] = c.num_cpus;
  j["area_side_m"] = c.area_side_m;
  j["tau_p"] = c.tau_p;
  j["tau_u"] = c.tau_u;
  j["tau_d"] = c.tau_d;
  j["tau_c"] = c.tau_c;
  j["ul_power_mw"] = c.ul_power_mw;
  j["ap_dl_power_mw"] = c.ap_dl_power_mw;
  j["noise_power_dbm"] = c.noise_power_dbm;
  j["median_gain_db"] = c.median_gain_db;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["shadow_std_db"] = c.shadow_std_db;
  j["zscore_threshold"] = c.zscore_threshold;
  j["max_clusters_per_ue"] = c.max_clusters_per_ue;
  j["delta_percent"] = c.delta_percent;
  j["border_margin_m"] = c.border_margin_m;
  j["power_exponent"] = c.power_exponent;
  j["correlation_model"] = correlation_model_name(c.correlation_model);
  j["angular_spread_deg"] = c.angular_spread_deg;
  Json schemes = Json::array();
  for (Scheme s : c.schemes) schemes.push_back(scheme_name(s));
  j["schemes"] = schemes;
  j["num_setups"] = c.num_setups;
  j["num_channel_realizations"] = c.num_channel_realizations;
  j["rng_seed"] = c.rng_seed;
  return j;
}

ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "num_ues") c.num_ues = value.get<int>();
    else if (key == "num_aps") c.num_aps = value.get<int>();
    else if (key == "antennas_per_ap") c.antennas_per_ap = value.get<int>();
    else if (key == "num_cpus") c.num_cpus = value.get<int>();
    else if (key == "area_side_m") c.area_side_m = value.get<double>();
    else if (key == "tau_p") c.tau_p = value.get<int>();
    else if (key == "tau_u") c.tau_u = value.get<int>();
    else if (key == "tau_d") c.tau_d = value.get<int>();
    else if (key == "tau_c") c.tau_c = value.get<int>();
    else if (key == "ul_power_mw") c.ul_power_mw = value.get<double>();
    else if (key == "ap_dl_power_mw") c.ap_dl_power_mw = value.get<double>();
    else if (key == "noise_power_dbm") c.noise_power_dbm = value.get<double>();
    else if (key == "median_gain_db") c.median_gain_db = value.get<double>();
    else if (key == "pathloss_exponent") c.pathloss_exponent = value.get<double>();
    else if (key == "shadow_std_db") c.shadow_std_db = value.get<double>();
    else if (key == "zscore_threshold") c.zscore_threshold = value.get<double>();
    else if (key == "max_clusters_per_ue") c.max_clusters_per_ue = value.get<int>();
    else if (key == "delta_percent") c.delta_percent = value.get<double>();
    else if (key == "border_margin_m") c.border_margin_m = value.get<double>();
    else if (key == "power_exponent") c.power_exponent = value.get<double>();
    else if (key == "correlation_model")
      c.correlation_model = correlation_model_from_name(value.get<std::string>());
    else if (key == "angular_spread_deg") c.angular_spread_deg = value.get<double>();
    else if (key == "schemes") {
      c.schemes.clear();
      for (const auto& s : value) c.schemes.push_back(scheme_from_name(s.get<std::string>()));
    }
    else if (key == "num_setups") c.num_setups = value.get<int>();
    else if (key == "num_channel_realizations")
      c.num_channel_realizations = value.get<int>();
    else if (key == "rng_seed") c.rng_seed = value.get<std::uint64_t>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return c;
}

Json count_stats_to_json(const CountStats& cs) {
  return Json{{"mean", cs.mean}, {"min", cs.min}, {"max", cs.max}};
}

Json scheme_report_to_json(const SchemeReport& r) {
  Json j;
  j["scheme"] = scheme_name(r.scheme);
  j["se_mean"] = r.se_mean;
  j["se_median"] = r.se_median;
  j["jain_mean"] = r.jain_mean;
  j["outage5_se"] = r.outage5;
  j["intercpu_load_scalars_mean"] = r.load_mean;
  j["aps_per_ue"] = count_stats_to_json(r.aps_per_ue);
  j["ues_per_ap"] = count_stats_to_json(r.ues_per_ap);
  j["ues_per_cpu"] = count_stats_to_json(r.ues_per_cpu_touched);
  j["ues_per_cpu_master"] = count_stats_to_json(r.ues_per_cpu_master);
  j["assoc_time_us_per_ue"] = r.assoc_time_us_per_ue;
  j["signal_stderr_mean"] = r.signal_stderr_mean;
  j["precoder_fallbacks"] = r.precoder_fallbacks;
  j["degenerate_zscores"] = r.degenerate_zscores;
  j["load_per_setup"] = r.load_per_setup;
  j["jain_per_setup"] = r.jain_per_setup;
  j["se_mean_per_setup"] = r.se_mean_per_setup;
  j["assoc_time_per_setup"] = r.assoc_time_per_setup;
  return j;
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
  return config_from_json(Json::parse(text));
}

std::string config_to_json_text(const ScenarioConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

void apply_override(ScenarioConfig& config, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must be key=value: " + key_value);
  }
  const std::string key = key_value.substr(0, eq);
  const std::string value = key_value.substr(eq + 1);

  Json j = config_to_json(config);
  if (!j.contains(key)) throw std::invalid_argument("unknown config key: " + key);
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = value;  // bare strings, e.g. correlation_model=uncorrelated
  }
  if (key == "schemes" && parsed.is_string()) {
    // comma-separated list shorthand
    Json arr = Json::array();
    std::stringstream ss(parsed.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(item);
    parsed = arr;
  }
  j[key] = parsed;
  config = config_from_json(j);
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep file: " + path);
  Json j = Json::parse(in);

  SweepSpec spec;
  if (!j.contains("base") || !j.contains("axis") || !j.contains("values")) {
    throw std::invalid_argument("sweep file needs base, axis and values");
  }
  spec.base = config_from_json(j["base"]);
  spec.axis = j["axis"].get<std::string>();
  for (const auto& v : j["values"]) spec.values.push_back(v.get<double>());
  if (j.contains("out_dir")) spec.out_dir = j["out_dir"].get<std::string>();
  return spec;
}

std::string topology_to_json_text(const Topology& topo) {
  Json j;
  Json aps = Json::array(), ues = Json::array(), centroids = Json::array();
  for (int l = 0; l < topo.num_aps(); ++l) {
    aps.push_back({topo.ap_pos(l, 0), topo.ap_pos(l, 1)});
  }
  for (int k = 0; k < topo.num_ues(); ++k) {
    ues.push_back({topo.ue_pos(k, 0), topo.ue_pos(k, 1)});
  }
  for (int u = 0; u < topo.num_cpus(); ++u) {
    centroids.push_back({topo.cpu_centroids(u, 0), topo.cpu_centroids(u, 1)});
  }
  j["ap_positions_m"] = aps;
  j["ue_positions_m"] = ues;
  j["cpu_centroids_m"] = centroids;
  j["ap_to_cpu"] = topo.ap_to_cpu;
  j["cpu_ap_sets"] = topo.cpu_aps;
  return j.dump(2) + "\n";
}

std::string association_to_json_text(const Association& assoc) {
  Json j;
  j["scheme"] = scheme_name(assoc.scheme);
  Json ues = Json::array();
  for (const AssociationEntry& e : assoc.entries) {
    Json entry;
    entry["serving_aps"] = e.serving_aps;
    entry["serving_cpus"] = e.serving_cpus;
    entry["master_cpu"] = e.master_cpu;
    ues.push_back(entry);
  }
  j["ues"] = ues;
  return j.dump(2) + "\n";
}

std::string report_to_json_text(const RunReport& report) {
  Json j;
  j["config"] = config_to_json(report.config);
  j["deterministic"] = report.deterministic;
  j["wall_seconds"] = report.wall_seconds;
  // UL pilot + UL data + DL data scalars an AP exchanges with its own CPU
  j["ap_cpu_load_scalars"] =
      static_cast<long long>(report.config.tau_c) * report.config.antennas_per_ap;
  Json schemes = Json::array();
  for (const SchemeReport& r : report.schemes) {
    schemes.push_back(scheme_report_to_json(r));
  }
  j["schemes"] = schemes;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

void write_report_files(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/report.json", report_to_json_text(report));

  std::ostringstream csv;
  csv << "scheme,num_ues,num_aps,antennas_per_ap,num_cpus,area_km2,"
         "se_mean,se_median,outage5_se,jain,intercpu_load_scalars,"
         "aps_per_ue_mean,aps_per_ue_min,aps_per_ue_max,"
         "ues_per_ap_mean,ues_per_ap_min,ues_per_ap_max,"
         "ues_per_cpu_mean,ues_per_cpu_master_mean,assoc_time_us_per_ue\n";
  const ScenarioConfig& c = report.config;
  const double area_km2 = c.area_side_m * c.area_side_m / 1e6;
  for (const SchemeReport& r : report.schemes) {
    csv << scheme_name(r.scheme) << ',' << c.num_ues << ',' << c.num_aps << ','
        << c.antennas_per_ap << ',' << c.num_cpus << ',' << fmt_double(area_km2)
        << ',' << fmt_double(r.se_mean) << ',' << fmt_double(r.se_median) << ','
        << fmt_double(r.outage5) << ',' << fmt_double(r.jain_mean) << ','
        << fmt_double(r.load_mean) << ',' << fmt_double(r.aps_per_ue.mean)
        << ',' << fmt_double(r.aps_per_ue.min) << ','
        << fmt_double(r.aps_per_ue.max) << ',' << fmt_double(r.ues_per_ap.mean)
        << ',' << fmt_double(r.ues_per_ap.min) << ','
        << fmt_double(r.ues_per_ap.max) << ','
        << fmt_double(r.ues_per_cpu_touched.mean) << ','
        << fmt_double(r.ues_per_cpu_master.mean) << ','
        << fmt_double(r.assoc_time_us_per_ue) << '\n';
  }
  write_text_file(dir + "/summary.csv", csv.str());

  std::ostringstream cdf;
  cdf << "scheme,se\n";
  for (const SchemeReport& r : report.schemes) {
    for (double se : r.se_cdf) {
      cdf << scheme_name(r.scheme) << ',' << fmt_double(se) << '\n';
    }
  }
  write_text_file(dir + "/se_cdf.csv", cdf.str());
}

void write_sweep_summary(const std::vector<RunReport>& reports,
                         const std::string& axis,
                         const std::vector<double>& values,
                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  csv << "axis,value,scheme,se_mean,intercpu_load_scalars,jain,outage5_se,"
         "aps_per_ue_mean\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const SchemeReport& r : reports[i].schemes) {
      csv << axis << ',' << fmt_double(values[i]) << ',' << scheme_name(r.scheme)
          << ',' << fmt_double(r.se_mean) << ',' << fmt_double(r.load_mean)
          << ',' << fmt_double(r.jain_mean) << ',' << fmt_double(r.outage5)
          << ',' << fmt_double(r.aps_per_ue.mean) << '\n';
    }
  }
  write_text_file(dir + "/sweep_summary.csv", csv.str());
}

void write_lsf_csv(const LsfState& lsf, const std::string& path) {
  std::ostringstream csv;
  csv << "ue,ap,beta_db\n";
  for (int k = 0; k < lsf.num_ues(); ++k) {
    for (int l = 0; l < lsf.num_aps(); ++l) {
      csv << k << ',' << l << ',' << fmt_double(lsf.beta_db(k, l)) << '\n';
    }
  }
  write_text_file(path, csv.str());
}

}  // namespace cfmimo
