#include "dpa/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dpa/errors.hpp"
#include "dpa/verification.hpp"

namespace dpa {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& need(const json& obj, const std::string& where,
                 const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(where + "." + key, "missing required field");
  }
  return obj.at(key);
}

double need_number(const json& obj, const std::string& where,
                   const std::string& key) {
  const json& v = need(obj, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

std::string need_string(const json& obj, const std::string& where,
                        const std::string& key) {
  const json& v = need(obj, where, key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) fail(where, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

struct ParsedAdvertiser {
  DistPtr dist;
  ConvPtr conv;
  bool ironing = false;
  ojson echo;
};

ParsedAdvertiser parse_advertiser(const json& node, const std::string& where) {
  if (!node.is_object()) fail(where, "expected an object");
  ParsedAdvertiser out;

  const json& domain = need(node, where, "price_domain");
  const auto dom = number_array(domain, where + ".price_domain");
  if (dom.size() != 2 || !(dom[0] <= dom[1])) {
    fail(where + ".price_domain", "expected [lower, upper] with lower <= upper");
  }

  const json& dist = need(node, where, "distribution");
  const std::string dkind = need_string(dist, where + ".distribution", "kind");
  ojson dist_echo;
  dist_echo["kind"] = dkind;
  if (dkind == "uniform") {
    const double lo = need_number(dist, where + ".distribution", "lower");
    const double hi = need_number(dist, where + ".distribution", "upper");
    out.dist = make_uniform(lo, hi);
    dist_echo["lower"] = lo;
    dist_echo["upper"] = hi;
  } else if (dkind == "truncated-exponential") {
    const double lo = need_number(dist, where + ".distribution", "lower");
    const double hi = need_number(dist, where + ".distribution", "upper");
    const double alpha = need_number(dist, where + ".distribution", "alpha");
    out.dist = make_truncated_exponential(lo, hi, alpha);
    dist_echo["lower"] = lo;
    dist_echo["upper"] = hi;
    dist_echo["alpha"] = alpha;
  } else if (dkind == "uniform-mixture") {
    const double w = need_number(dist, where + ".distribution", "weight");
    const auto first =
        number_array(need(dist, where + ".distribution", "first"),
                     where + ".distribution.first");
    const auto second =
        number_array(need(dist, where + ".distribution", "second"),
                     where + ".distribution.second");
    if (first.size() != 2 || second.size() != 2) {
      fail(where + ".distribution", "components must be [lower, upper]");
    }
    out.dist =
        make_uniform_mixture(w, first[0], first[1], second[0], second[1]);
    dist_echo["weight"] = w;
    dist_echo["first"] = first;
    dist_echo["second"] = second;
  } else {
    fail(where + ".distribution.kind", "unknown distribution '" + dkind + "'");
  }

  const json& conv = need(node, where, "conversion");
  const std::string ckind = need_string(conv, where + ".conversion", "kind");
  ojson conv_echo;
  conv_echo["kind"] = ckind;
  if (ckind == "constant") {
    const double level = need_number(conv, where + ".conversion", "level");
    out.conv = make_constant_conversion(level, dom[0], dom[1]);
    conv_echo["level"] = level;
  } else if (ckind == "linear") {
    const double a = need_number(conv, where + ".conversion", "intercept");
    const double b = need_number(conv, where + ".conversion", "slope");
    out.conv = make_linear_conversion(a, b, dom[0], dom[1]);
    conv_echo["intercept"] = a;
    conv_echo["slope"] = b;
  } else if (ckind == "exp-decay") {
    const double alpha = need_number(conv, where + ".conversion", "alpha");
    out.conv = make_exp_decay_conversion(alpha, dom[0], dom[1]);
    conv_echo["alpha"] = alpha;
  } else if (ckind == "unimodal") {
    out.conv = make_unimodal_conversion(dom[0], dom[1]);
  } else {
    fail(where + ".conversion.kind", "unknown conversion '" + ckind + "'");
  }

  if (node.contains("ironing")) {
    if (!node.at("ironing").is_boolean()) {
      fail(where + ".ironing", "expected a boolean");
    }
    out.ironing = node.at("ironing").get<bool>();
  }

  out.echo["distribution"] = std::move(dist_echo);
  out.echo["conversion"] = std::move(conv_echo);
  out.echo["price_domain"] = dom;
  out.echo["ironing"] = out.ironing;
  return out;
}

void build_config(ScenarioDoc& doc) {
  const Scenario& sc = doc.scenario;
  ojson cfg;
  ojson advs = ojson::array();
  for (std::size_t i = 0; i < sc.advertisers.size(); ++i) {
    ojson a = doc.config.is_object() &&
                      doc.config.contains("advertisers")
                  ? doc.config["advertisers"][i]
                  : ojson::object();
    a["index"] = sc.advertisers[i].index;
    a["regular"] = sc.advertisers[i].regular;
    advs.push_back(std::move(a));
  }
  cfg["advertisers"] = std::move(advs);

  ojson mech;
  mech["family"] = doc.family;
  mech["tie_break"] = sc.mechanism.tie_break;
  if (sc.mechanism.ama) {
    mech["weights"] = sc.mechanism.ama->weights;
    mech["boosts"] = sc.mechanism.ama->boosts;
  }
  if (sc.mechanism.pia_prices) {
    mech["pia_prices"] = *sc.mechanism.pia_prices;
  }
  cfg["mechanism"] = std::move(mech);

  ojson mode;
  mode["mode"] = price_mode_name(sc.price_mode);
  if (sc.price_mode == PriceMode::Fixed) mode["prices"] = sc.fixed_prices;
  cfg["price_mode"] = std::move(mode);

  ojson grid;
  grid["lower"] = sc.price_grid.lower;
  grid["upper"] = sc.price_grid.upper;
  grid["points"] = static_cast<std::uint64_t>(sc.price_grid.points);
  cfg["price_grid"] = std::move(grid);

  cfg["samples"] = static_cast<std::uint64_t>(sc.samples);
  cfg["seed"] = sc.seed;
  cfg["mc_batch"] = static_cast<std::uint64_t>(sc.exec.batch_size);
  doc.config = std::move(cfg);
}

}  // namespace

ScenarioDoc parse_scenario(const std::string& text,
                           const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    std::ostringstream os;
    os << origin << ":" << line << ": " << e.what();
    throw InputError(os.str());
  }
  if (!root.is_object()) fail(origin, "expected a top-level object");

  static const std::vector<std::string> known = {
      "advertisers", "mechanism", "price_mode", "price_grid",
      "samples",     "seed"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      fail(origin + "." + it.key(), "unknown field");
    }
  }

  ScenarioDoc doc;
  Scenario& sc = doc.scenario;

  const json& advs = need(root, origin, "advertisers");
  if (!advs.is_array() || advs.empty()) {
    fail(origin + ".advertisers", "expected a non-empty array");
  }
  std::vector<ParsedAdvertiser> parsed;
  for (std::size_t i = 0; i < advs.size(); ++i) {
    parsed.push_back(parse_advertiser(
        advs[i], origin + ".advertisers[" + std::to_string(i) + "]"));
  }

  ojson adv_echo = ojson::array();
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    sc.advertisers.push_back(make_advertiser(i, parsed[i].dist, parsed[i].conv,
                                             parsed[i].ironing));
    adv_echo.push_back(parsed[i].echo);
  }
  doc.config["advertisers"] = std::move(adv_echo);

  // Price grid: defaults to the union of the price domains with 2001 points.
  if (root.contains("price_grid")) {
    const json& g = root.at("price_grid");
    sc.price_grid.lower = need_number(g, origin + ".price_grid", "lower");
    sc.price_grid.upper = need_number(g, origin + ".price_grid", "upper");
    const double pts = need_number(g, origin + ".price_grid", "points");
    if (pts < 2 || pts != std::floor(pts)) {
      fail(origin + ".price_grid.points", "expected an integer >= 2");
    }
    sc.price_grid.points = static_cast<std::size_t>(pts);
  } else {
    double lo = parsed[0].conv->domain_lower();
    double hi = parsed[0].conv->domain_upper();
    for (const auto& p : parsed) {
      lo = std::min(lo, p.conv->domain_lower());
      hi = std::max(hi, p.conv->domain_upper());
    }
    sc.price_grid = {lo, hi, 2001};
  }
  sc.price_grid.validate();

  const json& mech = need(root, origin, "mechanism");
  doc.family = need_string(mech, origin + ".mechanism", "family");
  doc.broken = is_broken_family(doc.family);
  if (doc.family == "wm-rp" || doc.broken) {
    sc.mechanism.family = MechanismFamily::WmRp;
  } else if (doc.family == "vwm-rp") {
    sc.mechanism.family = MechanismFamily::VwmRp;
  } else if (doc.family == "vwm-pia") {
    sc.mechanism.family = MechanismFamily::VwmPia;
  } else if (doc.family == "ama") {
    sc.mechanism.family = MechanismFamily::Ama;
  } else {
    fail(origin + ".mechanism.family",
         "unknown mechanism family '" + doc.family + "'");
  }
  if (sc.mechanism.family == MechanismFamily::Ama) {
    AmaParams params;
    params.weights = number_array(need(mech, origin + ".mechanism", "weights"),
                                  origin + ".mechanism.weights");
    params.boosts = number_array(need(mech, origin + ".mechanism", "boosts"),
                                 origin + ".mechanism.boosts");
    try {
      params.validate(sc.advertisers.size());
    } catch (const InputError& e) {
      fail(origin + ".mechanism", e.what());
    }
    sc.mechanism.ama = std::move(params);
  } else if (mech.contains("weights") || mech.contains("boosts")) {
    fail(origin + ".mechanism",
         "weights/boosts are only valid for the ama family");
  }
  if (sc.mechanism.family == MechanismFamily::VwmPia) {
    if (mech.contains("pia_prices")) {
      sc.mechanism.pia_prices =
          number_array(mech.at("pia_prices"), origin + ".mechanism.pia_prices");
      if (sc.mechanism.pia_prices->size() != sc.advertisers.size()) {
        fail(origin + ".mechanism.pia_prices",
             "one equilibrium price per advertiser expected");
      }
    } else {
      std::vector<double> pbar(sc.advertisers.size());
      for (std::size_t i = 0; i < sc.advertisers.size(); ++i) {
        pbar[i] = pi_equilibrium_price(*sc.advertisers[i].conversion,
                                       sc.price_grid);
      }
      sc.mechanism.pia_prices = std::move(pbar);
    }
  } else if (mech.contains("pia_prices")) {
    fail(origin + ".mechanism",
         "pia_prices are only valid for the vwm-pia family");
  }

  const json& mode = need(root, origin, "price_mode");
  const std::string mode_name = need_string(mode, origin + ".price_mode",
                                            "mode");
  if (mode_name == "fixed") {
    sc.price_mode = PriceMode::Fixed;
    sc.fixed_prices = number_array(need(mode, origin + ".price_mode",
                                        "prices"),
                                   origin + ".price_mode.prices");
    if (sc.fixed_prices.size() != sc.advertisers.size()) {
      fail(origin + ".price_mode.prices",
           "one price per advertiser expected");
    }
    for (std::size_t i = 0; i < sc.fixed_prices.size(); ++i) {
      if (!sc.advertisers[i].conversion->in_domain(sc.fixed_prices[i])) {
        fail(origin + ".price_mode.prices[" + std::to_string(i) + "]",
             "price outside the advertiser's price domain");
      }
    }
  } else if (mode_name == "pi-equilibrium") {
    sc.price_mode = PriceMode::PiEquilibrium;
  } else if (mode_name == "ama-equilibrium") {
    sc.price_mode = PriceMode::AmaEquilibrium;
  } else {
    fail(origin + ".price_mode.mode",
         "unknown price mode '" + mode_name + "'");
  }

  if (root.contains("samples")) {
    const double s = need_number(root, origin, "samples");
    if (s < 1 || s != std::floor(s)) {
      fail(origin + ".samples", "expected an integer >= 1");
    }
    sc.samples = static_cast<std::size_t>(s);
  }
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      fail(origin + ".seed", "expected an integer");
    }
    sc.seed = s.get<std::uint64_t>();
  }

  // Virtual-welfare families need regular laws or attached surrogates.
  if (sc.mechanism.family == MechanismFamily::VwmRp ||
      sc.mechanism.family == MechanismFamily::VwmPia) {
    for (std::size_t i = 0; i < sc.advertisers.size(); ++i) {
      if (!sc.advertisers[i].can_run_virtual()) {
        fail(origin + ".advertisers[" + std::to_string(i) + "].ironing",
             "non-regular cost distribution requires \"ironing\": true for "
             "this mechanism family");
      }
    }
  }
  if (doc.broken && sc.price_mode != PriceMode::Fixed) {
    fail(origin + ".price_mode",
         "verification fixtures require fixed prices");
  }
  if (!doc.broken) sc.validate();

  build_config(doc);
  return doc;
}

ScenarioDoc load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void apply_overrides(ScenarioDoc& doc, std::optional<std::uint64_t> seed,
                     std::optional<std::size_t> samples) {
  if (seed) doc.scenario.seed = *seed;
  if (samples) {
    if (*samples < 1) throw InputError("--samples must be >= 1");
    doc.scenario.samples = *samples;
  }
  build_config(doc);
}

}  // namespace dpa
