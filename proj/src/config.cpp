#include "refsyn/config.hpp"

#include "refsyn/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace refsyn {

using nlohmann::json;

namespace {

class Reader {
public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string &where, const std::string &what) const {
    throw ConfigError(origin_ + ": " + where + ": " + what);
  }

  const json &field(const json &obj, const std::string &where, const char *key) const {
    if (!obj.is_object())
      fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end())
      fail(where + "." + key, "missing");
    return *it;
  }

  double number(const json &v, const std::string &where) const {
    if (!v.is_number())
      fail(where, "expected a number");
    return v.get<double>();
  }

  std::size_t count(const json &v, const std::string &where) const {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      fail(where, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string text(const json &v, const std::string &where) const {
    if (!v.is_string())
      fail(where, "expected a string");
    return v.get<std::string>();
  }

  std::pair<double, double> interval(const json &v, const std::string &where) const {
    if (!v.is_array() || v.size() != 2)
      fail(where, "expected [lower, upper]");
    const double lo = number(v[0], where + "[0]");
    const double hi = number(v[1], where + "[1]");
    if (lo > hi)
      fail(where, "lower bound exceeds upper bound");
    return {lo, hi};
  }

  std::vector<double> vector(const json &v, const std::string &where, std::size_t n) const {
    if (!v.is_array() || v.size() != n)
      fail(where, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<double> matrix(const json &v, const std::string &where, std::size_t rows,
                             std::size_t cols) const {
    if (!v.is_array() || v.size() != rows)
      fail(where, "expected " + std::to_string(rows) + " rows");
    std::vector<double> out;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = vector(v[r], where + "[" + std::to_string(r) + "]", cols);
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

  // Box given either as a list of intervals (axis order) or as an object
  // keyed by axis name; axes left out take the fallback's range.
  Box box(const json &v, const std::string &where, const std::vector<std::string> &axes,
          const Box *fallback) const {
    const std::size_t n = axes.size();
    Box b{std::vector<double>(n), std::vector<double>(n)};
    if (v.is_array()) {
      if (v.size() != n)
        fail(where, "expected " + std::to_string(n) + " intervals");
      for (std::size_t i = 0; i < n; ++i)
        std::tie(b.lo[i], b.hi[i]) = interval(v[i], where + "[" + std::to_string(i) + "]");
      return b;
    }
    if (!v.is_object())
      fail(where, "expected a list of intervals or an object keyed by axis");
    for (const auto &[key, _] : v.items())
      if (std::find(axes.begin(), axes.end(), key) == axes.end())
        fail(where + "." + key, "unknown axis");
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = v.find(axes[i]);
      if (it != v.end()) {
        std::tie(b.lo[i], b.hi[i]) = interval(*it, where + "." + axes[i]);
      } else if (fallback) {
        b.lo[i] = fallback->lo[i];
        b.hi[i] = fallback->hi[i];
      } else {
        fail(where + "." + axes[i], "missing");
      }
    }
    return b;
  }

  std::vector<std::size_t> grid(const json &v, const std::string &where,
                                const std::vector<std::string> &axes) const {
    std::vector<std::size_t> g(axes.size(), 1);
    if (v.is_number_integer()) {
      std::fill(g.begin(), g.end(), count(v, where));
    } else if (v.is_array()) {
      if (v.size() != axes.size())
        fail(where, "expected one cell count per axis");
      for (std::size_t i = 0; i < axes.size(); ++i)
        g[i] = count(v[i], where + "[" + std::to_string(i) + "]");
    } else if (v.is_object()) {
      for (std::size_t i = 0; i < axes.size(); ++i)
        if (auto it = v.find(axes[i]); it != v.end())
          g[i] = count(*it, where + "." + axes[i]);
    } else {
      fail(where, "expected a count, a list or an object");
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i] == 0)
        fail(where, "cell counts must be positive");
    return g;
  }

  Spec spec(const json &v, const std::string &where) const {
    Spec s;
    if (!v.is_object())
      fail(where, "expected an object");
    if (auto it = v.find("safe"); it != v.end())
      s.safe = text(*it, where + ".safe");
    if (auto it = v.find("persist"); it != v.end())
      s.persist = text(*it, where + ".persist");
    if (auto it = v.find("goals"); it != v.end()) {
      if (!it->is_array())
        fail(where + ".goals", "expected a list of names");
      for (std::size_t i = 0; i < it->size(); ++i)
        s.goals.push_back(text((*it)[i], where + ".goals[" + std::to_string(i) + "]"));
    }
    return s;
  }

private:
  std::string origin_;
};

ThermalConfig read_thermal(const Reader &rd, const json &doc) {
  ThermalConfig cfg;
  cfg.tau = rd.number(rd.field(doc, "$", "tau"), "$.tau");
  const json &zones = rd.field(doc, "$", "zones");
  if (!zones.is_array() || zones.empty())
    rd.fail("$.zones", "expected a nonempty list");
  std::vector<std::string> axes;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const std::string w = "$.zones[" + std::to_string(i) + "]";
    const json &z = zones[i];
    ThermalZone zone;
    zone.name = rd.text(rd.field(z, w, "name"), w + ".name");
    zone.type = z.contains("type") ? rd.text(z["type"], w + ".type") : "room";
    zone.capacitance = rd.number(rd.field(z, w, "capacitance"), w + ".capacitance");
    zone.gain = z.contains("gain") ? rd.number(z["gain"], w + ".gain") : 0.0;
    if (z.contains("water_resistance")) {
      zone.slab = true;
      zone.water_resistance = rd.number(z["water_resistance"], w + ".water_resistance");
    }
    axes.push_back(zone.name);
    cfg.zones.push_back(std::move(zone));
  }
  if (doc.contains("fixed")) {
    const json &fx = doc["fixed"];
    if (!fx.is_object())
      rd.fail("$.fixed", "expected an object of node temperatures");
    for (const auto &[k, v] : fx.items())
      cfg.fixed[k] = rd.number(v, "$.fixed." + k);
  }
  if (doc.contains("water_node"))
    cfg.water_node = rd.text(doc["water_node"], "$.water_node");
  if (doc.contains("links")) {
    const json &links = doc["links"];
    if (!links.is_array())
      rd.fail("$.links", "expected a list");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string w = "$.links[" + std::to_string(i) + "]";
      cfg.links.push_back({rd.text(rd.field(links[i], w, "a"), w + ".a"),
                           rd.text(rd.field(links[i], w, "b"), w + ".b"),
                           rd.number(rd.field(links[i], w, "resistance"), w + ".resistance")});
    }
  }
  cfg.domain = rd.box(rd.field(doc, "$", "domain"), "$.domain", axes, nullptr);
  cfg.grid = doc.contains("grid") ? rd.grid(doc["grid"], "$.grid", axes)
                                  : std::vector<std::size_t>(axes.size(), 1);
  if (doc.contains("disturbance")) {
    const Box zero(std::vector<double>(axes.size(), 0.0), std::vector<double>(axes.size(), 0.0));
    cfg.disturbance = rd.box(doc["disturbance"], "$.disturbance", axes, &zero);
  }
  if (doc.contains("propositions")) {
    const json &props = doc["propositions"];
    if (!props.is_object())
      rd.fail("$.propositions", "expected an object");
    for (const auto &[k, v] : props.items())
      cfg.propositions[k] = rd.box(v, "$.propositions." + k, axes, &cfg.domain);
  }
  return cfg;
}

System read_affine(const Reader &rd, const json &doc) {
  System sys;
  const json &axes_j = rd.field(doc, "$", "axes");
  if (!axes_j.is_array() || axes_j.empty())
    rd.fail("$.axes", "expected a nonempty list of names");
  for (std::size_t i = 0; i < axes_j.size(); ++i)
    sys.axis_names.push_back(rd.text(axes_j[i], "$.axes[" + std::to_string(i) + "]"));
  const auto &axes = sys.axis_names;
  const std::size_t n = axes.size();
  sys.domain = rd.box(rd.field(doc, "$", "domain"), "$.domain", axes, nullptr);
  sys.grid = doc.contains("grid") ? rd.grid(doc["grid"], "$.grid", axes)
                                  : std::vector<std::size_t>(n, 1);
  std::size_t nd = 0;
  if (doc.contains("disturbance")) {
    const json &d = doc["disturbance"];
    if (!d.is_array())
      rd.fail("$.disturbance", "expected a list of intervals");
    nd = d.size();
    std::vector<std::string> dn;
    for (std::size_t i = 0; i < nd; ++i)
      dn.push_back("d" + std::to_string(i));
    sys.disturbance = rd.box(d, "$.disturbance", dn, nullptr);
  }
  const json &modes = rd.field(doc, "$", "modes");
  if (!modes.is_array() || modes.empty())
    rd.fail("$.modes", "expected a nonempty list");
  for (std::size_t u = 0; u < modes.size(); ++u) {
    const std::string w = "$.modes[" + std::to_string(u) + "]";
    AffineMode m;
    m.dim = n;
    m.dist_dim = nd;
    m.a = rd.matrix(rd.field(modes[u], w, "a"), w + ".a", n, n);
    m.k = modes[u].contains("k") ? rd.vector(modes[u]["k"], w + ".k", n)
                                 : std::vector<double>(n, 0.0);
    if (nd > 0)
      m.e = rd.matrix(rd.field(modes[u], w, "e"), w + ".e", n, nd);
    sys.modes.push_back(std::move(m));
  }
  if (doc.contains("propositions")) {
    const json &props = doc["propositions"];
    if (!props.is_object())
      rd.fail("$.propositions", "expected an object");
    for (const auto &[k, v] : props.items())
      sys.propositions[k] = rd.box(v, "$.propositions." + k, axes, &sys.domain);
  }
  return sys;
}

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string &text, const std::string &origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
}

} // namespace

ProblemConfig parse_config(const std::string &json_text, const std::string &origin) {
  const json doc = parse_json(json_text, origin);
  Reader rd(origin);
  if (!doc.is_object())
    rd.fail("$", "expected an object");
  ProblemConfig pc;
  pc.name = doc.contains("name") ? rd.text(doc["name"], "$.name") : origin;
  const std::string kind = doc.contains("kind") ? rd.text(doc["kind"], "$.kind") : "thermal";
  if (kind == "thermal") {
    pc.thermal = read_thermal(rd, doc);
    try {
      pc.system = thermal_system(*pc.thermal);
    } catch (const ConfigError &e) {
      throw ConfigError(origin + ": " + e.what());
    }
  } else if (kind == "affine") {
    pc.system = read_affine(rd, doc);
    try {
      pc.system.validate();
    } catch (const ConfigError &e) {
      throw ConfigError(origin + ": " + e.what());
    }
  } else {
    rd.fail("$.kind", "expected \"thermal\" or \"affine\"");
  }
  // the safe set defaults to the whole domain
  if (!pc.system.propositions.count("A"))
    pc.system.propositions["A"] = pc.system.domain;
  if (doc.contains("spec"))
    pc.spec = rd.spec(doc["spec"], "$.spec");
  for (const auto &name : [&] {
         std::vector<std::string> all{pc.spec.safe, pc.spec.persist};
         all.insert(all.end(), pc.spec.goals.begin(), pc.spec.goals.end());
         return all;
       }())
    if (!pc.system.propositions.count(name))
      rd.fail("$.spec", "proposition '" + name + "' has no box in $.propositions");
  if (doc.contains("strict_actions") && doc["strict_actions"].is_boolean() &&
      doc["strict_actions"].get<bool>())
    pc.scope = ActionScope::All;
  if (doc.contains("refine")) {
    const json &r = doc["refine"];
    if (r.contains("splits_per_iteration"))
      pc.refine.splits_per_iteration =
          rd.count(r["splits_per_iteration"], "$.refine.splits_per_iteration");
    if (r.contains("min_width"))
      pc.refine.min_width = rd.number(r["min_width"], "$.refine.min_width");
    if (r.contains("max_iterations"))
      pc.refine.max_iterations = rd.count(r["max_iterations"], "$.refine.max_iterations");
  }
  if (doc.contains("target"))
    pc.target = rd.box(doc["target"], "$.target", pc.system.axis_names, &pc.system.domain);
  if (doc.contains("manager")) {
    const json &m = doc["manager"];
    if (m.contains("cache_log2"))
      pc.manager.cache_log2 =
          static_cast<unsigned>(rd.count(m["cache_log2"], "$.manager.cache_log2"));
    if (m.contains("gc_threshold"))
      pc.manager.gc_threshold = rd.count(m["gc_threshold"], "$.manager.gc_threshold");
    if (m.contains("sift_max_growth"))
      pc.manager.sift_max_growth = rd.number(m["sift_max_growth"], "$.manager.sift_max_growth");
    if (m.contains("anneal_initial_temp"))
      pc.manager.anneal_initial_temp =
          rd.number(m["anneal_initial_temp"], "$.manager.anneal_initial_temp");
    if (m.contains("anneal_cooling"))
      pc.manager.anneal_cooling = rd.number(m["anneal_cooling"], "$.manager.anneal_cooling");
    if (m.contains("anneal_iterations"))
      pc.manager.anneal_iterations =
          rd.count(m["anneal_iterations"], "$.manager.anneal_iterations");
  }
  return pc;
}

ProblemConfig load_config(const std::filesystem::path &path) {
  return parse_config(slurp(path), path.string());
}

Spec parse_spec(const std::string &json_text, const std::string &origin) {
  return Reader(origin).spec(parse_json(json_text, origin), "$");
}

Spec load_spec(const std::filesystem::path &path) {
  return parse_spec(slurp(path), path.string());
}

} // namespace refsyn
