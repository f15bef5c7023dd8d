#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kboot/error.hpp"
#include "kboot/harness.hpp"

namespace kboot {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  fail(ErrorCode::ConfigError, "config field '" + field + "': " + message);
}

double to_double(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    config_error(field, "expected a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    config_error(field, "expected an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& field, const std::string& text) {
  const std::string t = lower(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  config_error(field, "expected a boolean, got '" + text + "'");
}

template <class T, class Parse>
std::vector<T> parse_each(const std::string& field, const std::vector<std::string>& items, Parse parse) {
  if (items.empty()) config_error(field, "list must not be empty");
  std::vector<T> out;
  for (const auto& item : items) out.push_back(parse(item));
  return out;
}

// JSON values may be scalars or lists; everything is funnelled through the
// string override path so both entry points share one parser.
std::string json_to_text(const std::string& field, const json& value) {
  if (value.is_array()) {
    std::string out;
    for (const auto& item : value) {
      if (!out.empty()) out += ",";
      out += json_to_text(field, item);
    }
    return out;
  }
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << value.get<double>();
    return os.str();
  }
  config_error(field, "unsupported JSON value");
}

}  // namespace

std::string to_string(Design design) { return design == Design::I ? "I" : "II"; }

std::string to_string(DataCase data_case) {
  return data_case == DataCase::Asymmetric ? "asymmetric" : "symmetric";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::EB: return "EB";
    case Method::GB: return "GB";
    case Method::MB: return "MB";
    case Method::RB: return "RB";
    case Method::BB: return "BB";
    case Method::DB: return "DB";
  }
  return "?";
}

Design parse_design(const std::string& text) {
  const std::string t = upper(trim(text));
  if (t == "I" || t == "1") return Design::I;
  if (t == "II" || t == "2") return Design::II;
  config_error("design", "expected I or II, got '" + text + "'");
}

DataCase parse_case(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "asymmetric" || t == "asym" || t == "a") return DataCase::Asymmetric;
  if (t == "symmetric" || t == "sym" || t == "s") return DataCase::Symmetric;
  config_error("case", "expected asymmetric or symmetric, got '" + text + "'");
}

Method parse_method(const std::string& text) {
  const std::string t = upper(trim(text));
  for (Method m : {Method::EB, Method::GB, Method::MB, Method::RB, Method::BB, Method::DB})
    if (to_string(m) == t) return m;
  config_error("methods", "unknown method '" + text + "' (expected EB, GB, MB, RB, BB, DB)");
}

MultiplierLaw parse_law(const std::string& text, double beta_nu) {
  const std::string t = lower(trim(text));
  if (t == "gaussian" || t == "normal") return MultiplierLaw::gaussian();
  if (t == "mammen") return MultiplierLaw::mammen();
  if (t == "rademacher") return MultiplierLaw::rademacher();
  if (t == "beta") return MultiplierLaw::beta(beta_nu);
  config_error("law", "unknown multiplier law '" + text + "'");
}

CorrelationSpec correlation_for(Design design, double rho, int d) {
  CorrelationSpec spec;
  spec.family = design == Design::I ? CorrelationFamily::EquiCorr : CorrelationFamily::AR1;
  spec.rho = rho;
  spec.d = d;
  return spec;
}

void ExperimentConfig::validate() const {
  if (designs.empty()) config_error("designs", "list must not be empty");
  if (rhos.empty()) config_error("rho", "list must not be empty");
  if (ns.empty()) config_error("n", "list must not be empty");
  if (ks.empty()) config_error("k", "list must not be empty");
  if (cases.empty()) config_error("case", "list must not be empty");
  if (methods.empty()) config_error("methods", "list must not be empty");
  if (d < 1) config_error("d", "must be at least 1");
  for (int n : ns)
    if (n < 2) config_error("n", "every sample size must be at least 2");
  for (int k : ks)
    if (k < 1 || k > d) config_error("k", "every k must lie in [1, d]");
  for (double rho : rhos) {
    for (Design design : designs) {
      if (design == Design::I && !(rho >= 0.0 && rho < 1.0)) config_error("rho", "Design I needs rho in [0, 1)");
      if (design == Design::II && !(std::abs(rho) < 1.0)) config_error("rho", "Design II needs |rho| < 1");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha", "must lie in (0, 1)");
  if (B1 < 1) config_error("B1", "must be at least 1");
  if (std::find(methods.begin(), methods.end(), Method::DB) != methods.end() && B2 < 1)
    config_error("B2", "DB requires B2 >= 1");
  if (reps < 1) config_error("reps", "must be at least 1");
  if (threads < 0) config_error("threads", "must be nonnegative (0 = auto)");
  if (!(theta_asymmetric > 0.0)) config_error("theta_asymmetric", "must be positive");
  if (!(theta_symmetric > 0.0)) config_error("theta_symmetric", "must be positive");
  if (!(beta_nu > 0.0)) config_error("beta_nu", "must be positive");
  parse_law(db_outer, beta_nu);
  if (!parse_law(db_inner, beta_nu).matches_third_moment())
    config_error("db_inner", "second-level law must have E v^3 = 1 (beta or mammen)");
  std::set<Method> seen(methods.begin(), methods.end());
  if (seen.size() != methods.size()) config_error("methods", "duplicate method");
  if (diagnostics.reps < 1) config_error("diagnostics.reps", "must be at least 1");
  if (!(diagnostics.eps > 0.0 && diagnostics.eps < 0.5)) config_error("diagnostics.eps", "must lie in (0, 1/2)");
  if (diagnostics.k0 < 1) config_error("diagnostics.k0", "must be at least 1");
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  const std::string t = lower(name);
  if (t == "desk") {
    c.designs = {Design::I, Design::II};
    c.rhos = {0.2, 0.8};
    c.ns = {200};
    c.d = 100;
    c.ks = {2};
    c.cases = {DataCase::Asymmetric, DataCase::Symmetric};
    c.methods = {Method::GB, Method::MB, Method::RB, Method::BB};
    c.B1 = 299;
    c.B2 = 49;
    c.reps = 2000;
  } else if (t == "paper") {
    c.designs = {Design::I, Design::II};
    c.rhos = {0.2, 0.8};
    c.ns = {200, 400};
    c.d = 400;
    c.ks = {2};
    c.cases = {DataCase::Asymmetric, DataCase::Symmetric};
    c.methods = {Method::EB, Method::GB, Method::MB, Method::RB, Method::BB, Method::DB};
    c.B1 = 499;
    c.B2 = 99;
    c.reps = 1000;
  } else {
    config_error("preset", "unknown preset '" + name + "' (expected desk or paper)");
  }
  return c;
}

void apply_override(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = lower(trim(raw_key));
  const auto items = split_list(value);
  auto single = [&]() -> std::string {
    if (items.size() != 1) config_error(key, "expected a single value");
    return items.front();
  };
  auto to_int = [&](const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) config_error(key, "out of range");
    return static_cast<int>(v);
  };

  if (key == "design" || key == "designs") {
    c.designs = parse_each<Design>(key, items, parse_design);
  } else if (key == "rho" || key == "rhos") {
    c.rhos = parse_each<double>(key, items, [&](const std::string& s) { return to_double(key, s); });
  } else if (key == "n" || key == "ns") {
    c.ns = parse_each<int>(key, items, to_int);
  } else if (key == "d") {
    c.d = to_int(single());
  } else if (key == "k" || key == "ks") {
    c.ks = parse_each<int>(key, items, to_int);
  } else if (key == "case" || key == "cases") {
    c.cases = parse_each<DataCase>(key, items, parse_case);
  } else if (key == "theta_asymmetric") {
    c.theta_asymmetric = to_double(key, single());
  } else if (key == "theta_symmetric") {
    c.theta_symmetric = to_double(key, single());
  } else if (key == "methods" || key == "method") {
    c.methods = parse_each<Method>(key, items, parse_method);
  } else if (key == "alpha") {
    c.alpha = to_double(key, single());
  } else if (key == "b1") {
    c.B1 = to_int(single());
  } else if (key == "b2") {
    c.B2 = to_int(single());
  } else if (key == "reps") {
    c.reps = to_int(single());
  } else if (key == "seed") {
    const std::string s = single();
    if (s.empty() || s.front() == '-') config_error(key, "expected an unsigned integer");
    try {
      std::size_t used = 0;
      c.seed = std::stoull(s, &used, 0);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      config_error(key, "expected an unsigned integer, got '" + s + "'");
    }
  } else if (key == "threads") {
    const std::string s = lower(single());
    c.threads = s == "auto" ? 0 : to_int(s);
  } else if (key == "gaussian_data") {
    c.gaussian_data = to_bool(key, single());
  } else if (key == "db_outer") {
    c.db_outer = lower(single());
  } else if (key == "db_inner") {
    c.db_inner = lower(single());
  } else if (key == "beta_nu") {
    c.beta_nu = to_double(key, single());
  } else if (key == "diagnostics.reps") {
    c.diagnostics.reps = to_int(single());
  } else if (key == "diagnostics.eps") {
    c.diagnostics.eps = to_double(key, single());
  } else if (key == "diagnostics.k0") {
    c.diagnostics.k0 = to_int(single());
  } else if (key == "diagnostics.bound_constant") {
    c.diagnostics.bound_constant = to_double(key, single());
  } else {
    config_error(key, "unknown field");
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");

  ExperimentConfig c;
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) config_error("preset", "expected a string");
    c = preset(doc["preset"].get<std::string>());
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    if (key == "diagnostics") {
      if (!value.is_object()) config_error("diagnostics", "expected an object");
      for (const auto& [sub, subvalue] : value.items())
        apply_override(c, "diagnostics." + sub, json_to_text("diagnostics." + sub, subvalue));
      continue;
    }
    apply_override(c, key, json_to_text(key, value));
  }
  c.validate();
  return c;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  for (Design d : c.designs) doc["designs"].push_back(to_string(d));
  doc["rhos"] = c.rhos;
  doc["ns"] = c.ns;
  doc["d"] = c.d;
  doc["ks"] = c.ks;
  for (DataCase dc : c.cases) doc["cases"].push_back(to_string(dc));
  doc["theta_asymmetric"] = c.theta_asymmetric;
  doc["theta_symmetric"] = c.theta_symmetric;
  for (Method m : c.methods) doc["methods"].push_back(to_string(m));
  doc["alpha"] = c.alpha;
  doc["B1"] = c.B1;
  doc["B2"] = c.B2;
  doc["reps"] = c.reps;
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  doc["gaussian_data"] = c.gaussian_data;
  doc["db_outer"] = c.db_outer;
  doc["db_inner"] = c.db_inner;
  doc["beta_nu"] = c.beta_nu;
  doc["diagnostics"] = {{"reps", c.diagnostics.reps},
                        {"eps", c.diagnostics.eps},
                        {"k0", c.diagnostics.k0},
                        {"bound_constant", c.diagnostics.bound_constant}};
  return doc.dump(2);
}

}  // namespace kboot
