#include "coplan/system_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coplan {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void fail(InputError::Kind kind, const std::string& msg) { throw InputError(kind, msg); }

// Strict object reader: every key must be consumed, unknown keys are rejected.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(InputError::Kind::parse, where_ + ": expected an object");
  }

  template <class T>
  T required(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(InputError::Kind::parse, where_ + ": missing key '" + key + "'");
    return convert<T>(*it, key);
  }

  template <class T>
  T optional(const char* key, T fallback) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return fallback;
    return convert<T>(*it, key);
  }

  template <class T>
  std::optional<T> maybe(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    return convert<T>(*it, key);
  }

  const json& array(const char* key, bool required = true) {
    seen_.insert(key);
    static const json empty = json::array();
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) fail(InputError::Kind::parse, where_ + ": missing key '" + key + "'");
      return empty;
    }
    if (!it->is_array()) fail(InputError::Kind::parse, where_ + "." + key + ": expected an array");
    return *it;
  }

  const json& object(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(InputError::Kind::parse, where_ + ": missing key '" + key + "'");
    return *it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(InputError::Kind::parse, where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  template <class T>
  T convert(const json& v, const char* key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("not a number");
      } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("not a string");
      }
      return v.get<T>();
    } catch (const std::exception& e) {
      fail(InputError::Kind::parse, where_ + "." + key + ": " + e.what());
    }
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string at(const char* section, std::size_t i) { return std::string(section) + "[" + std::to_string(i) + "]"; }

PolicyEconomics parse_policy(const json& j) {
  Fields f(j, "policy");
  PolicyEconomics p;
  p.stages = f.optional("stages", p.stages);
  p.stage_years = f.optional("stage_years", p.stage_years);
  p.interest_rate = f.optional("interest_rate", p.interest_rate);
  p.lifetime_line_years = f.maybe<double>("lifetime_line_years");
  p.lifetime_storage_years = f.maybe<double>("lifetime_storage_years");
  p.lifetime_wind_years = f.maybe<double>("lifetime_wind_years");
  p.rps_share = f.optional("rps_share", p.rps_share);
  p.max_curtailment = f.optional("max_curtailment", p.max_curtailment);
  p.max_hourly_shed = f.optional("max_hourly_shed", p.max_hourly_shed);
  p.max_annual_shed = f.optional("max_annual_shed", p.max_annual_shed);
  p.reserve_cost_factor = f.optional("reserve_cost_factor", p.reserve_cost_factor);
  p.load_growth = f.optional("load_growth", p.load_growth);
  p.base_mva = f.optional("base_mva", p.base_mva);
  p.shed_cost_usd_per_mwh = f.optional("shed_cost_usd_per_mwh", p.shed_cost_usd_per_mwh);
  p.theta_max_rad = f.optional("theta_max_rad", p.theta_max_rad);
  p.reserve_wind_share = f.optional("reserve_wind_share", p.reserve_wind_share);
  p.reserve_load_share = f.optional("reserve_load_share", p.reserve_load_share);
  f.finish();
  return p;
}

json policy_json(const PolicyEconomics& p) {
  json j = {{"stages", p.stages},
            {"stage_years", p.stage_years},
            {"interest_rate", p.interest_rate},
            {"rps_share", p.rps_share},
            {"max_curtailment", p.max_curtailment},
            {"max_hourly_shed", p.max_hourly_shed},
            {"max_annual_shed", p.max_annual_shed},
            {"reserve_cost_factor", p.reserve_cost_factor},
            {"load_growth", p.load_growth},
            {"base_mva", p.base_mva},
            {"shed_cost_usd_per_mwh", p.shed_cost_usd_per_mwh},
            {"theta_max_rad", p.theta_max_rad},
            {"reserve_wind_share", p.reserve_wind_share},
            {"reserve_load_share", p.reserve_load_share}};
  if (p.lifetime_line_years) j["lifetime_line_years"] = *p.lifetime_line_years;
  if (p.lifetime_storage_years) j["lifetime_storage_years"] = *p.lifetime_storage_years;
  if (p.lifetime_wind_years) j["lifetime_wind_years"] = *p.lifetime_wind_years;
  return j;
}

BundlingOption default_option(const std::string& name) {
  // Conductor-per-phase uprates of 43% and 85%; single-circuit costs in M$/km.
  if (name == "two_per_phase") return {name, 0.455, 0.43};
  if (name == "four_per_phase") return {name, 0.837, 0.85};
  fail(InputError::Kind::domain, "unknown bundling option '" + name + "'");
}

void check_bus(const std::set<int>& ids, int bus, const std::string& where) {
  if (!ids.count(bus)) fail(InputError::Kind::reference, where + ": unknown bus id " + std::to_string(bus));
}

}  // namespace

std::size_t SystemData::bus_index(int id) const {
  auto it = bus_lookup_.find(id);
  if (it == bus_lookup_.end()) throw InputError(InputError::Kind::reference, "unknown bus id " + std::to_string(id));
  return it->second;
}

std::size_t SystemData::existing_line_index(int id) const {
  auto it = line_lookup_.find(id);
  if (it == line_lookup_.end())
    throw InputError(InputError::Kind::reference, "unknown existing line id " + std::to_string(id));
  return it->second;
}

std::optional<std::size_t> SystemData::bundling_for_line(std::size_t line_index) const {
  const int line_id = existing_lines.at(line_index).id;
  for (std::size_t k = 0; k < bundling.size(); ++k) {
    if (bundling[k].target_line == line_id) return k;
  }
  return std::nullopt;
}

double SystemData::total_peak_load() const {
  return std::accumulate(buses.begin(), buses.end(), 0.0,
                         [](double acc, const Bus& b) { return acc + b.peak_load_mw; });
}

double SystemData::shed_cost(std::size_t bus) const {
  return buses.at(bus).shed_cost_usd_per_mwh.value_or(policy.shed_cost_usd_per_mwh);
}

void SystemData::reindex() {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  auto by_bus = [](const auto& a, const auto& b) { return a.bus < b.bus; };
  std::stable_sort(buses.begin(), buses.end(), by_id);
  std::stable_sort(existing_lines.begin(), existing_lines.end(), by_id);
  std::stable_sort(candidate_lines.begin(), candidate_lines.end(), by_id);
  std::stable_sort(bundling.begin(), bundling.end(), by_id);
  std::stable_sort(units.begin(), units.end(), by_id);
  std::stable_sort(wind.begin(), wind.end(), by_bus);
  std::stable_sort(storage.begin(), storage.end(), by_bus);
  bus_lookup_.clear();
  line_lookup_.clear();
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!bus_lookup_.emplace(buses[i].id, i).second)
      throw InputError(InputError::Kind::domain, "duplicate bus id " + std::to_string(buses[i].id));
  }
  for (std::size_t i = 0; i < existing_lines.size(); ++i) {
    if (!line_lookup_.emplace(existing_lines[i].id, i).second)
      throw InputError(InputError::Kind::domain, "duplicate existing line id " + std::to_string(existing_lines[i].id));
  }
}

bool operator==(const SystemData& a, const SystemData& b) {
  // Serialization is canonical (sorted, fixed key order), so it doubles as deep equality.
  return serialize_system(a) == serialize_system(b);
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.severity == ValidationIssue::Severity::error; });
}

SystemData parse_system(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(InputError::Kind::parse, std::string("malformed JSON: ") + e.what());
  }
  Fields top(root, "system");
  const int version = top.required<int>("format_version");
  if (version != kFormatVersion)
    fail(InputError::Kind::parse, "unsupported format_version " + std::to_string(version));

  SystemData sys;
  sys.name = top.optional<std::string>("name", "");
  sys.policy = parse_policy(top.object("policy"));

  std::set<int> bus_ids;
  const auto& buses = top.array("buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    Fields f(buses[i], at("buses", i));
    Bus b;
    b.id = f.required<int>("id");
    b.is_new = f.optional("is_new", false);
    b.peak_load_mw = f.optional("peak_load_mw", 0.0);
    b.shed_cost_usd_per_mwh = f.maybe<double>("shed_cost_usd_per_mwh");
    f.finish();
    bus_ids.insert(b.id);
    sys.buses.push_back(b);
  }

  std::set<int> line_ids;
  const auto& lines = top.array("existing_lines", false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto where = at("existing_lines", i);
    Fields f(lines[i], where);
    ExistingLine l;
    l.id = f.required<int>("id");
    l.from_bus = f.required<int>("from_bus");
    l.to_bus = f.required<int>("to_bus");
    l.susceptance_pu = f.required<double>("susceptance_pu");
    l.capacity_mw = f.required<double>("capacity_mw");
    l.circuits = f.optional("circuits", 1);
    f.finish();
    check_bus(bus_ids, l.from_bus, where);
    check_bus(bus_ids, l.to_bus, where);
    line_ids.insert(l.id);
    sys.existing_lines.push_back(l);
  }

  const auto& cands = top.array("candidate_lines", false);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto where = at("candidate_lines", i);
    Fields f(cands[i], where);
    CandidateLine c;
    c.id = f.required<int>("id");
    c.from_bus = f.required<int>("from_bus");
    c.to_bus = f.required<int>("to_bus");
    c.length_km = f.required<double>("length_km");
    c.invest_cost_musd_per_km = f.required<double>("invest_cost_musd_per_km");
    c.row_cost_musd_per_km = f.optional("row_cost_musd_per_km", 0.0);
    c.substation_cost_musd = f.maybe<double>("substation_cost_musd");
    c.susceptance_pu = f.required<double>("susceptance_pu");
    c.capacity_mw = f.required<double>("capacity_mw");
    c.circuits = f.optional("circuits", 1);
    c.max_parallel = f.optional("max_parallel", 1);
    c.is_new_corridor = f.optional("is_new_corridor", false);
    f.finish();
    check_bus(bus_ids, c.from_bus, where);
    check_bus(bus_ids, c.to_bus, where);
    sys.candidate_lines.push_back(c);
  }

  const auto& bundles = top.array("bundling_candidates", false);
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const auto where = at("bundling_candidates", i);
    Fields f(bundles[i], where);
    BundlingCandidate b;
    b.id = f.required<int>("id");
    b.target_line = f.required<int>("target_line");
    b.length_km = f.required<double>("length_km");
    const auto& opts = f.array("options", false);
    if (opts.empty()) {
      b.options = {default_option("two_per_phase"), default_option("four_per_phase")};
    }
    for (std::size_t k = 0; k < opts.size(); ++k) {
      Fields of(opts[k], where + ".options[" + std::to_string(k) + "]");
      const auto name = of.required<std::string>("name");
      BundlingOption o = default_option(name);
      o.cost_musd_per_km = of.optional("cost_musd_per_km", o.cost_musd_per_km);
      o.uprate = of.optional("uprate", o.uprate);
      of.finish();
      b.options.push_back(o);
    }
    f.finish();
    if (!line_ids.count(b.target_line))
      fail(InputError::Kind::reference, where + ": unknown existing line id " + std::to_string(b.target_line));
    sys.bundling.push_back(b);
  }

  const auto& units = top.array("thermal_units", false);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto where = at("thermal_units", i);
    Fields f(units[i], where);
    ThermalUnit u;
    u.id = f.required<int>("id");
    u.bus = f.required<int>("bus");
    u.pmin_mw = f.optional("pmin_mw", 0.0);
    u.pmax_mw = f.required<double>("pmax_mw");
    u.segment_costs_usd_per_mwh = f.required<std::vector<double>>("segment_costs_usd_per_mwh");
    u.ramp_up_mw = f.optional("ramp_up_mw", u.pmax_mw);
    u.ramp_down_mw = f.optional("ramp_down_mw", u.pmax_mw);
    u.must_run = f.optional("must_run", false);
    f.finish();
    check_bus(bus_ids, u.bus, where);
    sys.units.push_back(u);
  }

  const auto& winds = top.array("wind_candidates", false);
  for (std::size_t i = 0; i < winds.size(); ++i) {
    const auto where = at("wind_candidates", i);
    Fields f(winds[i], where);
    WindCandidate w;
    w.bus = f.required<int>("bus");
    w.max_capacity_mw = f.required<double>("max_capacity_mw");
    w.invest_cost_musd_per_mw = f.required<double>("invest_cost_musd_per_mw");
    w.curtail_cost_usd_per_mwh = f.optional("curtail_cost_usd_per_mwh", 1000.0);
    f.finish();
    check_bus(bus_ids, w.bus, where);
    sys.wind.push_back(w);
  }

  const auto& stores = top.array("storage_candidates", false);
  for (std::size_t i = 0; i < stores.size(); ++i) {
    const auto where = at("storage_candidates", i);
    Fields f(stores[i], where);
    StorageCandidate s;
    s.bus = f.required<int>("bus");
    s.max_power_mw = f.required<double>("max_power_mw");
    s.max_energy_mwh = f.required<double>("max_energy_mwh");
    s.power_cost_usd_per_mw = f.required<double>("power_cost_usd_per_mw");
    s.energy_cost_usd_per_mwh = f.required<double>("energy_cost_usd_per_mwh");
    s.degradation_cost_usd_per_mwh = f.optional("degradation_cost_usd_per_mwh", 0.0);
    s.eta_charge = f.optional("eta_charge", s.eta_charge);
    s.eta_discharge = f.optional("eta_discharge", s.eta_discharge);
    s.energy_to_power_h = f.optional("energy_to_power_h", s.energy_to_power_h);
    f.finish();
    check_bus(bus_ids, s.bus, where);
    sys.storage.push_back(s);
  }
  top.finish();

  sys.reindex();
  const auto report = validate(sys);
  for (const auto& issue : report.issues) {
    if (issue.severity != ValidationIssue::Severity::error) continue;
    fail(issue.kind == "reference" ? InputError::Kind::reference : InputError::Kind::domain, issue.message);
  }
  return sys;
}

SystemData load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(InputError::Kind::io, "cannot open system file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string serialize_system(const SystemData& src) {
  SystemData sys = src;
  sys.reindex();
  json root;
  root["format_version"] = kFormatVersion;
  root["name"] = sys.name;
  root["policy"] = policy_json(sys.policy);
  root["buses"] = json::array();
  for (const auto& b : sys.buses) {
    json j = {{"id", b.id}, {"peak_load_mw", b.peak_load_mw}, {"is_new", b.is_new}};
    if (b.shed_cost_usd_per_mwh) j["shed_cost_usd_per_mwh"] = *b.shed_cost_usd_per_mwh;
    root["buses"].push_back(j);
  }
  root["existing_lines"] = json::array();
  for (const auto& l : sys.existing_lines) {
    root["existing_lines"].push_back({{"id", l.id},
                                      {"from_bus", l.from_bus},
                                      {"to_bus", l.to_bus},
                                      {"susceptance_pu", l.susceptance_pu},
                                      {"capacity_mw", l.capacity_mw},
                                      {"circuits", l.circuits}});
  }
  root["candidate_lines"] = json::array();
  for (const auto& c : sys.candidate_lines) {
    json j = {{"id", c.id},
              {"from_bus", c.from_bus},
              {"to_bus", c.to_bus},
              {"length_km", c.length_km},
              {"invest_cost_musd_per_km", c.invest_cost_musd_per_km},
              {"row_cost_musd_per_km", c.row_cost_musd_per_km},
              {"susceptance_pu", c.susceptance_pu},
              {"capacity_mw", c.capacity_mw},
              {"circuits", c.circuits},
              {"max_parallel", c.max_parallel},
              {"is_new_corridor", c.is_new_corridor}};
    if (c.substation_cost_musd) j["substation_cost_musd"] = *c.substation_cost_musd;
    root["candidate_lines"].push_back(j);
  }
  root["bundling_candidates"] = json::array();
  for (const auto& b : sys.bundling) {
    json opts = json::array();
    for (const auto& o : b.options)
      opts.push_back({{"name", o.name}, {"cost_musd_per_km", o.cost_musd_per_km}, {"uprate", o.uprate}});
    root["bundling_candidates"].push_back(
        {{"id", b.id}, {"target_line", b.target_line}, {"length_km", b.length_km}, {"options", opts}});
  }
  root["thermal_units"] = json::array();
  for (const auto& u : sys.units) {
    root["thermal_units"].push_back({{"id", u.id},
                                     {"bus", u.bus},
                                     {"pmin_mw", u.pmin_mw},
                                     {"pmax_mw", u.pmax_mw},
                                     {"segment_costs_usd_per_mwh", u.segment_costs_usd_per_mwh},
                                     {"ramp_up_mw", u.ramp_up_mw},
                                     {"ramp_down_mw", u.ramp_down_mw},
                                     {"must_run", u.must_run}});
  }
  root["wind_candidates"] = json::array();
  for (const auto& w : sys.wind) {
    root["wind_candidates"].push_back({{"bus", w.bus},
                                       {"max_capacity_mw", w.max_capacity_mw},
                                       {"invest_cost_musd_per_mw", w.invest_cost_musd_per_mw},
                                       {"curtail_cost_usd_per_mwh", w.curtail_cost_usd_per_mwh}});
  }
  root["storage_candidates"] = json::array();
  for (const auto& s : sys.storage) {
    root["storage_candidates"].push_back({{"bus", s.bus},
                                          {"max_power_mw", s.max_power_mw},
                                          {"max_energy_mwh", s.max_energy_mwh},
                                          {"power_cost_usd_per_mw", s.power_cost_usd_per_mw},
                                          {"energy_cost_usd_per_mwh", s.energy_cost_usd_per_mwh},
                                          {"degradation_cost_usd_per_mwh", s.degradation_cost_usd_per_mwh},
                                          {"eta_charge", s.eta_charge},
                                          {"eta_discharge", s.eta_discharge},
                                          {"energy_to_power_h", s.energy_to_power_h}});
  }
  return root.dump(2);
}

void save_system(const SystemData& sys, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(InputError::Kind::io, "cannot write " + path.string());
  out << serialize_system(sys) << '\n';
}

ValidationReport validate(const SystemData& sys) {
  ValidationReport report;
  auto error = [&](std::string kind, std::string msg) {
    report.issues.push_back({ValidationIssue::Severity::error, std::move(kind), std::move(msg)});
  };
  auto warning = [&](std::string kind, std::string msg) {
    report.issues.push_back({ValidationIssue::Severity::warning, std::move(kind), std::move(msg)});
  };
  auto fraction = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) error("domain", std::string(name) + " must lie in [0,1], got " + std::to_string(v));
  };

  std::map<int, std::size_t> bus_pos;
  for (std::size_t i = 0; i < sys.buses.size(); ++i) {
    const auto& b = sys.buses[i];
    if (!bus_pos.emplace(b.id, i).second) error("domain", "duplicate bus id " + std::to_string(b.id));
    if (!(b.peak_load_mw >= 0.0)) error("domain", "bus " + std::to_string(b.id) + ": negative peak load");
  }
  auto has_bus = [&](int id, const std::string& who) {
    if (bus_pos.count(id)) return true;
    error("reference", who + ": unknown bus id " + std::to_string(id));
    return false;
  };

  const auto& p = sys.policy;
  if (p.stages < 1) error("domain", "stages must be >= 1");
  if (p.stage_years < 1) error("domain", "stage_years must be >= 1");
  if (!(p.interest_rate > 0.0)) error("domain", "interest_rate must be > 0");
  fraction(p.rps_share, "rps_share");
  fraction(p.max_curtailment, "max_curtailment");
  fraction(p.max_hourly_shed, "max_hourly_shed");
  fraction(p.max_annual_shed, "max_annual_shed");
  fraction(p.reserve_cost_factor, "reserve_cost_factor");
  fraction(p.load_growth, "load_growth");
  fraction(p.reserve_wind_share, "reserve_wind_share");
  fraction(p.reserve_load_share, "reserve_load_share");
  if (!(p.base_mva > 0.0)) error("domain", "base_mva must be > 0");
  if (!(p.theta_max_rad > 0.0)) error("domain", "theta_max_rad must be > 0");
  for (auto lt : {p.lifetime_line_years, p.lifetime_storage_years, p.lifetime_wind_years}) {
    if (lt && !(*lt >= 1.0)) error("domain", "asset lifetimes must be >= 1 year");
  }

  std::map<int, std::size_t> line_pos;
  for (std::size_t i = 0; i < sys.existing_lines.size(); ++i) {
    const auto& l = sys.existing_lines[i];
    const auto who = "existing line " + std::to_string(l.id);
    if (!line_pos.emplace(l.id, i).second) error("domain", "duplicate " + who);
    has_bus(l.from_bus, who);
    has_bus(l.to_bus, who);
    if (l.from_bus == l.to_bus) error("domain", who + ": from_bus equals to_bus");
    if (!(l.capacity_mw > 0.0)) error("domain", who + ": capacity must be > 0");
    if (!(l.susceptance_pu > 0.0)) error("domain", who + ": susceptance must be > 0");
    if (l.circuits != 1 && l.circuits != 2) error("domain", who + ": circuits must be 1 or 2");
  }

  std::set<int> cand_ids;
  for (const auto& c : sys.candidate_lines) {
    const auto who = "candidate line " + std::to_string(c.id);
    if (!cand_ids.insert(c.id).second) error("domain", "duplicate " + who);
    has_bus(c.from_bus, who);
    has_bus(c.to_bus, who);
    if (c.from_bus == c.to_bus) error("domain", who + ": from_bus equals to_bus");
    if (!(c.capacity_mw > 0.0)) error("domain", who + ": capacity must be > 0");
    if (!(c.susceptance_pu > 0.0)) error("domain", who + ": susceptance must be > 0");
    if (!(c.length_km >= 0.0) || !(c.invest_cost_musd_per_km >= 0.0) || !(c.row_cost_musd_per_km >= 0.0))
      error("domain", who + ": costs and length must be >= 0");
    if (c.max_parallel < 1) error("domain", who + ": max_parallel must be >= 1");
    if (c.is_new_corridor != c.substation_cost_musd.has_value())
      error("domain", who + ": substation_cost_musd must be given exactly for new corridors");
    if (c.substation_cost_musd && *c.substation_cost_musd < 0.0) error("domain", who + ": negative substation cost");
  }

  std::set<int> bundled_lines;
  std::set<int> bundle_ids;
  for (const auto& b : sys.bundling) {
    const auto who = "bundling candidate " + std::to_string(b.id);
    if (!bundle_ids.insert(b.id).second) error("domain", "duplicate " + who);
    if (!line_pos.count(b.target_line))
      error("reference", who + ": unknown existing line id " + std::to_string(b.target_line));
    if (!bundled_lines.insert(b.target_line).second)
      error("domain", who + ": line " + std::to_string(b.target_line) + " already has a bundling candidate");
    if (b.options.empty()) error("domain", who + ": no bundling options");
    if (!(b.length_km >= 0.0)) error("domain", who + ": negative length");
    for (const auto& o : b.options) {
      if (!(o.uprate > 0.0 && o.uprate <= 1.0)) error("domain", who + ": uprate must lie in (0,1]");
      if (!(o.cost_musd_per_km >= 0.0)) error("domain", who + ": negative cost");
    }
  }

  std::set<int> unit_ids;
  for (const auto& u : sys.units) {
    const auto who = "thermal unit " + std::to_string(u.id);
    if (!unit_ids.insert(u.id).second) error("domain", "duplicate " + who);
    has_bus(u.bus, who);
    if (!(u.pmin_mw >= 0.0 && u.pmin_mw <= u.pmax_mw)) error("domain", who + ": need 0 <= pmin <= pmax");
    if (u.segment_costs_usd_per_mwh.empty()) error("domain", who + ": at least one cost segment required");
    for (std::size_t k = 0; k < u.segment_costs_usd_per_mwh.size(); ++k) {
      if (u.segment_costs_usd_per_mwh[k] < 0.0) error("domain", who + ": negative segment cost");
      if (k > 0 && u.segment_costs_usd_per_mwh[k] < u.segment_costs_usd_per_mwh[k - 1])
        error("domain", who + ": segment costs must be nondecreasing");
    }
    if (!(u.ramp_up_mw >= 0.0 && u.ramp_down_mw >= 0.0)) error("domain", who + ": negative ramp limit");
  }

  std::set<int> wind_buses;
  for (const auto& w : sys.wind) {
    const auto who = "wind candidate at bus " + std::to_string(w.bus);
    has_bus(w.bus, who);
    if (!wind_buses.insert(w.bus).second) error("domain", "duplicate " + who);
    if (!(w.max_capacity_mw >= 0.0) || !(w.invest_cost_musd_per_mw >= 0.0) || !(w.curtail_cost_usd_per_mwh >= 0.0))
      error("domain", who + ": negative capacity or cost");
  }

  std::set<int> store_buses;
  for (const auto& s : sys.storage) {
    const auto who = "storage candidate at bus " + std::to_string(s.bus);
    has_bus(s.bus, who);
    if (!store_buses.insert(s.bus).second) error("domain", "duplicate " + who);
    if (!(s.eta_charge > 0.0 && s.eta_charge <= 1.0)) error("domain", who + ": eta_charge must lie in (0,1]");
    if (!(s.eta_discharge > 0.0 && s.eta_discharge <= 1.0)) error("domain", who + ": eta_discharge must lie in (0,1]");
    if (!(s.max_power_mw >= 0.0) || !(s.max_energy_mwh >= 0.0)) error("domain", who + ": negative capacity");
    if (!(s.power_cost_usd_per_mw >= 0.0) || !(s.energy_cost_usd_per_mwh >= 0.0) ||
        !(s.degradation_cost_usd_per_mwh >= 0.0))
      error("domain", who + ": negative cost");
    if (!(s.energy_to_power_h >= 0.0)) error("domain", who + ": negative energy-to-power ratio");
    if (s.energy_to_power_h * s.max_power_mw > s.max_energy_mwh)
      warning("domain", who + ": energy_to_power_h * max_power exceeds max_energy; power capacity is limited");
  }

  // Load buses must be reachable through existing or candidate lines from some supply.
  if (report.ok() && !sys.buses.empty()) {
    std::vector<std::size_t> parent(sys.buses.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto join = [&](int a, int b) { parent[find(bus_pos.at(a))] = find(bus_pos.at(b)); };
    for (const auto& l : sys.existing_lines) join(l.from_bus, l.to_bus);
    for (const auto& c : sys.candidate_lines) join(c.from_bus, c.to_bus);
    std::set<std::size_t> supplied;
    for (const auto& u : sys.units) supplied.insert(find(bus_pos.at(u.bus)));
    for (const auto& w : sys.wind) supplied.insert(find(bus_pos.at(w.bus)));
    std::map<int, int> degree;
    for (const auto& l : sys.existing_lines) ++degree[l.from_bus], ++degree[l.to_bus];
    for (const auto& c : sys.candidate_lines) ++degree[c.from_bus], ++degree[c.to_bus];
    for (const auto& b : sys.buses) {
      const bool isolated_new = b.is_new && sys.buses.size() > 1 && degree[b.id] == 0;
      const bool unsupplied = b.peak_load_mw > 0.0 && !supplied.count(find(bus_pos.at(b.id)));
      if (isolated_new || unsupplied)
        warning("connectivity", "bus " + std::to_string(b.id) + " is unreachable even with all candidates built");
    }
  }
  return report;
}

IncidenceMatrices incidence_matrices(const SystemData& src) {
  SystemData sys = src;
  sys.reindex();
  const auto nb = static_cast<Eigen::Index>(sys.buses.size());
  IncidenceMatrices m;
  m.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.existing_lines.size()), nb);
  m.K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.candidate_lines.size()), nb);
  m.Ab = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.bundling.size()),
                               static_cast<Eigen::Index>(sys.existing_lines.size()));
  for (std::size_t l = 0; l < sys.existing_lines.size(); ++l) {
    const auto& e = sys.existing_lines[l];
    m.A(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(sys.bus_index(e.from_bus))) = 1.0;
    m.A(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(sys.bus_index(e.to_bus))) = -1.0;
  }
  for (std::size_t l = 0; l < sys.candidate_lines.size(); ++l) {
    const auto& c = sys.candidate_lines[l];
    m.K(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(sys.bus_index(c.from_bus))) = 1.0;
    m.K(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(sys.bus_index(c.to_bus))) = -1.0;
  }
  for (std::size_t k = 0; k < sys.bundling.size(); ++k) {
    m.Ab(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(sys.existing_line_index(sys.bundling[k].target_line))) =
        1.0;
  }
  return m;
}

HourlySeries load_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(InputError::Kind::io, "cannot open series file " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(InputError::Kind::parse, path.string() + ": empty file");
  auto trim = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    return s;
  };
  if (trim(line) != "hour,load_factor,wind_factor")
    fail(InputError::Kind::parse, path.string() + ": expected header 'hour,load_factor,wind_factor'");
  HourlySeries series;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string hour, lf, wf;
    if (!std::getline(ss, hour, ',') || !std::getline(ss, lf, ',') || !std::getline(ss, wf, ','))
      fail(InputError::Kind::parse, path.string() + ":" + std::to_string(row) + ": expected 3 columns");
    double l = 0, w = 0;
    try {
      std::size_t used = 0;
      l = std::stod(lf, &used);
      if (used != lf.size()) throw std::invalid_argument(lf);
      w = std::stod(wf, &used);
      if (used != wf.size()) throw std::invalid_argument(wf);
    } catch (const std::exception&) {
      fail(InputError::Kind::parse, path.string() + ":" + std::to_string(row) + ": non-numeric factor");
    }
    if (!(l >= 0.0 && l <= 1.0 && w >= 0.0 && w <= 1.0))
      fail(InputError::Kind::domain, path.string() + ":" + std::to_string(row) + ": factors must lie in [0,1]");
    series.load_factor.push_back(l);
    series.wind_factor.push_back(w);
  }
  if (series.size() == 0) fail(InputError::Kind::parse, path.string() + ": no data rows");
  return series;
}

void save_series_csv(const HourlySeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(InputError::Kind::io, "cannot write " + path.string());
  out << "hour,load_factor,wind_factor\n";
  out.precision(17);
  for (std::size_t h = 0; h < series.size(); ++h)
    out << h + 1 << ',' << series.load_factor[h] << ',' << series.wind_factor[h] << '\n';
}

HourlySeries synthetic_series(std::size_t hours, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  HourlySeries s;
  s.load_factor.reserve(hours);
  s.wind_factor.reserve(hours);
  const double two_pi = 2.0 * std::acos(-1.0);
  double wind_state = 0.0;
  for (std::size_t h = 0; h < hours; ++h) {
    const double day = static_cast<double>(h % 24) / 24.0;
    const double year = static_cast<double>(h) / 8760.0;
    double load = 0.68 + 0.12 * std::cos(two_pi * year) - 0.12 * std::cos(two_pi * day) + 0.02 * noise(rng);
    // AR(1) wind with a winter-heavy seasonal mean.
    wind_state = 0.95 * wind_state + 0.3 * noise(rng);
    double wind = 0.38 + 0.12 * std::cos(two_pi * year) + 0.18 * wind_state;
    s.load_factor.push_back(std::clamp(load, 0.0, 1.0));
    s.wind_factor.push_back(std::clamp(wind, 0.0, 1.0));
  }
  return s;
}

}  // namespace coplan
