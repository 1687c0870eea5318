#include "queuenet/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "queuenet/error.hpp"
#include "queuenet/toml_lite.hpp"

namespace queuenet {
namespace {

// Typed access to one table; unknown keys are reported by finish().
class Section {
 public:
  Section(const toml::Table* table, std::string prefix) : t_(table), prefix_(std::move(prefix)) {}

  bool has(const std::string& key) const { return t_ && t_->find(key); }

  double num(const std::string& key, double fallback) {
    const toml::Value* v = get(key);
    if (!v) return fallback;
    if (const auto* d = std::get_if<double>(&v->data)) return *d;
    fail(*v, key, "expected a number");
  }

  int integer(const std::string& key, int fallback) {
    const toml::Value* v = get(key);
    if (!v) return fallback;
    const auto* d = std::get_if<double>(&v->data);
    if (!d || std::floor(*d) != *d || std::abs(*d) > 1e9) fail(*v, key, "expected an integer");
    return static_cast<int>(*d);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const int n = integer(key, static_cast<int>(fallback));
    if (n < 0) fail(*get(key), key, "expected a non-negative integer");
    return static_cast<std::size_t>(n);
  }

  std::string str(const std::string& key, const std::string& fallback) {
    const toml::Value* v = get(key);
    if (!v) return fallback;
    if (const auto* s = std::get_if<std::string>(&v->data)) return *s;
    fail(*v, key, "expected a string");
  }

  bool flag(const std::string& key, bool fallback) {
    const toml::Value* v = get(key);
    if (!v) return fallback;
    if (const auto* b = std::get_if<bool>(&v->data)) return *b;
    fail(*v, key, "expected true or false");
  }

  std::vector<double> list(const std::string& key) {
    const toml::Value* v = get(key);
    if (!v) throw ParseError("missing field '" + field(key) + "'", t_ ? t_->line : 0);
    if (const auto* a = std::get_if<std::vector<double>>(&v->data)) return *a;
    fail(*v, key, "expected an array of numbers");
  }

  std::array<double, 3> triple(const std::string& key, std::array<double, 3> fallback) {
    if (!has(key)) return fallback;
    std::vector<double> a = list(key);
    if (a.size() != 3) fail(*get(key), key, "expected 3 values (taxi, bus, subway)");
    return {a[0], a[1], a[2]};
  }

  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : t_->entries) {
      if (!used_.count(k)) throw ParseError("unknown field '" + field(k) + "'", v.line);
    }
  }

  std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  int line_of(const std::string& key) const {
    const toml::Value* v = t_ ? t_->find(key) : nullptr;
    return v ? v->line : (t_ ? t_->line : 0);
  }

 private:
  const toml::Value* get(const std::string& key) {
    if (!t_) return nullptr;
    used_.insert(key);
    return t_->find(key);
  }

  [[noreturn]] void fail(const toml::Value& v, const std::string& key, const std::string& what) const {
    throw ParseError("field '" + field(key) + "': " + what, v.line);
  }

  const toml::Table* t_;
  std::string prefix_;
  std::set<std::string> used_;
};

std::string resolve(const std::string& base, const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

// A profile given inline (`<key>` values on `<breaks_key>`), as a
// `<key>_csv` profile file or as a `<key>_timetable` flight list.
std::optional<RateProfile> read_profile(Section& s, const std::string& key, const std::string& breaks_key,
                                        const std::string& base, double start, double horizon) {
  const int line = s.line_of(key);
  try {
    if (s.has(key)) return RateProfile(s.list(breaks_key), s.list(key));
    if (s.has(key + "_csv")) return read_profile_csv_file(resolve(base, s.str(key + "_csv", "")));
    if (s.has(key + "_timetable")) {
      const auto flights = read_timetable_csv_file(resolve(base, s.str(key + "_timetable", "")));
      const double spread = s.num("spread", 30.0);
      const double bin = s.num("bin", 5.0);
      return timetable_to_profile(flights, spread, bin, std::make_pair(start, start + horizon));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("field '" + s.field(key) + "': " + e.what(), line);
  }
  return std::nullopt;
}

SubwayOrder parse_order(const std::string& s, int line) {
  if (s == "security_first") return SubwayOrder::SecurityFirst;
  if (s == "ticket_first") return SubwayOrder::TicketFirst;
  throw ParseError("field 'subway.order': expected \"security_first\" or \"ticket_first\"", line);
}

const char* order_name(SubwayOrder o) { return o == SubwayOrder::SecurityFirst ? "security_first" : "ticket_first"; }

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }
bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void Scenario::validate() const {
  require(!name.empty(), "name must not be empty");
  require(std::isfinite(start), "start must be finite");
  require(finite_pos(horizon), "horizon must be > 0");
  require(rates.total.t_start() <= start, "rates.total must start at or before start");
  require(rates.taxi_supply.t_start() <= start, "rates.taxi_supply must start at or before start");
  if (rates.shares) {
    try {
      rates.shares->validate(1e-9);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("rates.shares: ") + e.what());
    }
  }

  require(finite_pos(taxi.mu), "taxi.mu must be > 0");
  require(taxi.K_T >= 1, "taxi.K_T must be >= 1");
  require(taxi.initial_passengers >= 0, "initial.L_X must be >= 0");
  require(taxi.initial_taxis >= 0 && taxi.initial_taxis <= taxi.K_T, "initial.taxis must be in [0, taxi.K_T]");

  require(bus.q_B >= 0.0 && bus.q_B <= 1.0, "bus.q_B must be in [0, 1]");
  require(finite_pos(bus.mu_B), "bus.mu_B must be > 0");
  require(bus.c_B >= 1, "bus.c_B must be >= 1");
  require(bus.N >= 1, "bus.N must be >= 1");
  require(finite_pos(bus.T), "bus.T must be > 0");
  require(finite_pos(bus.boarding_step), "bus.boarding_step must be > 0");
  require(bus.initial_ticket_queue >= 0, "initial.L_B must be >= 0");
  require(bus.initial_aboard >= 0 && bus.initial_aboard <= bus.N, "initial.m0 must be in [0, bus.N]");
  require(bus.initial_elapsed >= 0.0 && bus.initial_elapsed <= bus.T, "initial.t0 must be in [0, bus.T]");

  require(subway.q_S >= 0.0 && subway.q_S <= 1.0, "subway.q_S must be in [0, 1]");
  require(finite_pos(subway.mu_S1), "subway.mu_S1 must be > 0");
  require(finite_pos(subway.mu_S2), "subway.mu_S2 must be > 0");
  require(subway.c_S1 >= 1, "subway.c_S1 must be >= 1");
  require(subway.c_S2 >= 1, "subway.c_S2 must be >= 1");
  require(finite_nonneg(subway.M), "subway.M must be >= 0");
  require(subway.initial_security_queue >= 0, "initial.L_S1 must be >= 0");
  require(subway.initial_ticket_queue >= 0, "initial.L_S2 must be >= 0");

  choice.validate();

  require(finite_pos(solver.dt), "solver.dt must be > 0");
  require(solver.tail_eps > 0.0 && solver.tail_eps <= 1e-3, "solver.tail_eps must be in (0, 1e-3]");
  require(finite_nonneg(solver.max_wait), "solver.max_wait must be >= 0");
  require(solver.threads >= 1, "solver.threads must be >= 1");

  equilibrium.validate();
  optimizer.validate();
}

Scenario parse_scenario(std::istream& in, const std::string& base_dir) {
  const toml::Document doc = toml::parse(in);
  Scenario sc;

  Section root(doc.table(""), "");
  sc.name = root.str("name", sc.name);
  sc.start = root.num("start", sc.start);
  sc.horizon = root.num("horizon", sc.horizon);
  root.finish();

  for (const toml::Table& t : doc.tables) {
    static const std::set<std::string> known{"",       "rates",  "taxi",   "bus",         "subway",
                                             "initial", "choice", "solver", "equilibrium", "optimizer"};
    if (t.array_element ? t.name != "choice.class" : !known.count(t.name)) {
      throw ParseError("unknown section [" + t.name + "]", t.line);
    }
  }

  Section rates(doc.table("rates"), "rates");
  auto total = read_profile(rates, "total", "breakpoints", base_dir, sc.start, sc.horizon);
  if (!total) throw ParseError("field 'rates.total': missing (give total, total_csv or total_timetable)", 0);
  sc.rates.total = *total;
  if (auto supply = read_profile(rates, "taxi_supply", "supply_breakpoints", base_dir, sc.start, sc.horizon)) {
    sc.rates.taxi_supply = *supply;
  } else if (auto dep = read_profile(rates, "departures", "departure_breakpoints", base_dir, sc.start, sc.horizon)) {
    sc.rates.taxi_supply = dep->scaled(rates.num("supply_factor", 0.05));
  } else {
    throw ParseError("field 'rates.taxi_supply': missing (give taxi_supply or departures)", 0);
  }
  if (rates.has("shares")) {
    const auto s = rates.triple("shares", {});
    sc.rates.shares = ShareVector{s[0], s[1], s[2]};
  }
  rates.finish();

  Section taxi(doc.table("taxi"), "taxi");
  sc.taxi.mu = taxi.num("mu", sc.taxi.mu);
  sc.taxi.K_T = taxi.integer("K_T", sc.taxi.K_T);
  sc.taxi.passenger_cap = taxi.count("passenger_cap", sc.taxi.passenger_cap);
  taxi.finish();

  Section bus(doc.table("bus"), "bus");
  sc.bus.q_B = bus.num("q_B", sc.bus.q_B);
  sc.bus.mu_B = bus.num("mu_B", sc.bus.mu_B);
  sc.bus.c_B = bus.integer("c_B", sc.bus.c_B);
  sc.bus.N = bus.integer("N", sc.bus.N);
  sc.bus.T = bus.num("T", sc.bus.T);
  sc.bus.K_B = bus.count("K_B", sc.bus.K_B);
  sc.bus.boarding_step = bus.num("boarding_step", sc.bus.boarding_step);
  bus.finish();

  Section sub(doc.table("subway"), "subway");
  sc.subway.q_S = sub.num("q_S", sc.subway.q_S);
  sc.subway.mu_S1 = sub.num("mu_S1", sc.subway.mu_S1);
  sc.subway.mu_S2 = sub.num("mu_S2", sc.subway.mu_S2);
  sc.subway.c_S1 = sub.integer("c_S1", sc.subway.c_S1);
  sc.subway.c_S2 = sub.integer("c_S2", sc.subway.c_S2);
  sc.subway.K_S1 = sub.count("K_S1", sc.subway.K_S1);
  sc.subway.K_S2 = sub.count("K_S2", sc.subway.K_S2);
  sc.subway.M = sub.num("M", sc.subway.M);
  sc.subway.order = parse_order(sub.str("order", order_name(sc.subway.order)), sub.line_of("order"));
  sc.subway.has_security = sub.flag("security", sc.subway.has_security);
  sub.finish();

  Section init(doc.table("initial"), "initial");
  sc.taxi.initial_passengers = init.integer("L_X", sc.taxi.initial_passengers);
  sc.taxi.initial_taxis = init.integer("taxis", sc.taxi.initial_taxis);
  sc.bus.initial_ticket_queue = init.integer("L_B", sc.bus.initial_ticket_queue);
  sc.bus.initial_aboard = init.integer("m0", sc.bus.initial_aboard);
  sc.bus.initial_elapsed = init.num("t0", sc.bus.initial_elapsed);
  sc.subway.initial_security_queue = init.integer("L_S1", sc.subway.initial_security_queue);
  sc.subway.initial_ticket_queue = init.integer("L_S2", sc.subway.initial_ticket_queue);
  init.finish();

  Section choice(doc.table("choice"), "choice");
  sc.choice.tau = choice.num("tau", sc.choice.tau);
  choice.finish();
  const auto classes = doc.array("choice.class");
  for (const toml::Table* t : classes) {
    Section c(t, "choice.class");
    PassengerClass pc;
    pc.name = c.str("name", "class" + std::to_string(sc.choice.classes.size() + 1));
    pc.proportion = c.num("proportion", 1.0 / static_cast<double>(classes.size()));
    const auto O = c.triple("O", {0.0, 0.0, 0.0});
    const auto wT = c.triple("w_T", {1.0, 1.0, 1.0});
    const auto wO = c.triple("w_O", {1.0, 1.0, 1.0});
    const auto wJ = c.triple("w_J", {1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < 3; ++i) pc.modes[i] = ModeUtility{O[i], wT[i], wO[i], wJ[i]};
    c.finish();
    sc.choice.classes.push_back(pc);
  }

  Section solver(doc.table("solver"), "solver");
  sc.solver.dt = solver.num("dt", sc.solver.dt);
  sc.solver.tail_eps = solver.num("tail_eps", sc.solver.tail_eps);
  sc.solver.max_wait = solver.num("max_wait", sc.solver.max_wait);
  sc.solver.threads = solver.integer("threads", sc.solver.threads);
  {
    const double seed = solver.num("seed", static_cast<double>(sc.optimizer.seed));
    if (seed < 0.0 || std::floor(seed) != seed || seed > 9007199254740992.0) {
      throw ParseError("field 'solver.seed': expected a non-negative integer", solver.line_of("seed"));
    }
    sc.optimizer.seed = static_cast<std::uint64_t>(seed);
  }
  solver.finish();

  Section eq(doc.table("equilibrium"), "equilibrium");
  sc.equilibrium.d = eq.num("d", sc.equilibrium.d);
  sc.equilibrium.eps = eq.num("eps", sc.equilibrium.eps);
  sc.equilibrium.max_iter = eq.integer("max_iter", sc.equilibrium.max_iter);
  sc.equilibrium.t_e = eq.num("t_e", sc.equilibrium.t_e);
  eq.finish();

  Section opt(doc.table("optimizer"), "optimizer");
  sc.optimizer.n_ants = opt.integer("n_ants", sc.optimizer.n_ants);
  sc.optimizer.n_antlions = opt.integer("n_antlions", sc.optimizer.n_antlions);
  sc.optimizer.t_max = opt.integer("t_max", sc.optimizer.t_max);
  sc.optimizer.lower = opt.triple("lower", sc.optimizer.lower);
  sc.optimizer.upper = opt.triple("upper", sc.optimizer.upper);
  opt.finish();

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario '" + path + "'");
  const std::filesystem::path p(path);
  return parse_scenario(in, p.has_parent_path() ? p.parent_path().string() : std::string("."));
}

namespace {

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_list(std::span<const double> xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += fmt(xs[i]);
  }
  return s + "]";
}

std::string fmt_list(const std::array<double, 3>& xs) { return fmt_list(std::span<const double>(xs)); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_scenario(std::ostream& out, const Scenario& sc) {
  out << "name = " << quoted(sc.name) << "\n";
  out << "start = " << fmt(sc.start) << "\n";
  out << "horizon = " << fmt(sc.horizon) << "\n";

  out << "\n[rates]\n";
  out << "breakpoints = " << fmt_list(sc.rates.total.breakpoints()) << "\n";
  out << "total = " << fmt_list(sc.rates.total.values()) << "\n";
  out << "supply_breakpoints = " << fmt_list(sc.rates.taxi_supply.breakpoints()) << "\n";
  out << "taxi_supply = " << fmt_list(sc.rates.taxi_supply.values()) << "\n";
  if (sc.rates.shares) {
    const ShareVector& s = *sc.rates.shares;
    out << "shares = " << fmt_list(std::array<double, 3>{s.alpha, s.beta, s.gamma}) << "\n";
  }

  out << "\n[taxi]\n";
  out << "mu = " << fmt(sc.taxi.mu) << "\n";
  out << "K_T = " << sc.taxi.K_T << "\n";
  out << "passenger_cap = " << sc.taxi.passenger_cap << "\n";

  out << "\n[bus]\n";
  out << "q_B = " << fmt(sc.bus.q_B) << "\n";
  out << "mu_B = " << fmt(sc.bus.mu_B) << "\n";
  out << "c_B = " << sc.bus.c_B << "\n";
  out << "N = " << sc.bus.N << "\n";
  out << "T = " << fmt(sc.bus.T) << "\n";
  out << "K_B = " << sc.bus.K_B << "\n";
  out << "boarding_step = " << fmt(sc.bus.boarding_step) << "\n";

  out << "\n[subway]\n";
  out << "q_S = " << fmt(sc.subway.q_S) << "\n";
  out << "mu_S1 = " << fmt(sc.subway.mu_S1) << "\n";
  out << "mu_S2 = " << fmt(sc.subway.mu_S2) << "\n";
  out << "c_S1 = " << sc.subway.c_S1 << "\n";
  out << "c_S2 = " << sc.subway.c_S2 << "\n";
  out << "K_S1 = " << sc.subway.K_S1 << "\n";
  out << "K_S2 = " << sc.subway.K_S2 << "\n";
  out << "M = " << fmt(sc.subway.M) << "\n";
  out << "order = " << quoted(order_name(sc.subway.order)) << "\n";
  out << "security = " << (sc.subway.has_security ? "true" : "false") << "\n";

  out << "\n[initial]\n";
  out << "L_X = " << sc.taxi.initial_passengers << "\n";
  out << "taxis = " << sc.taxi.initial_taxis << "\n";
  out << "L_B = " << sc.bus.initial_ticket_queue << "\n";
  out << "m0 = " << sc.bus.initial_aboard << "\n";
  out << "t0 = " << fmt(sc.bus.initial_elapsed) << "\n";
  out << "L_S1 = " << sc.subway.initial_security_queue << "\n";
  out << "L_S2 = " << sc.subway.initial_ticket_queue << "\n";

  out << "\n[choice]\n";
  out << "tau = " << fmt(sc.choice.tau) << "\n";
  for (const PassengerClass& c : sc.choice.classes) {
    std::array<double, 3> O{}, wT{}, wO{}, wJ{};
    for (std::size_t i = 0; i < 3; ++i) {
      O[i] = c.modes[i].O;
      wT[i] = c.modes[i].w_T;
      wO[i] = c.modes[i].w_O;
      wJ[i] = c.modes[i].w_J;
    }
    out << "\n[[choice.class]]\n";
    out << "name = " << quoted(c.name) << "\n";
    out << "proportion = " << fmt(c.proportion) << "\n";
    out << "O = " << fmt_list(O) << "\n";
    out << "w_T = " << fmt_list(wT) << "\n";
    out << "w_O = " << fmt_list(wO) << "\n";
    out << "w_J = " << fmt_list(wJ) << "\n";
  }

  out << "\n[solver]\n";
  out << "dt = " << fmt(sc.solver.dt) << "\n";
  out << "tail_eps = " << fmt(sc.solver.tail_eps) << "\n";
  out << "max_wait = " << fmt(sc.solver.max_wait) << "\n";
  out << "threads = " << sc.solver.threads << "\n";
  out << "seed = " << sc.optimizer.seed << "\n";

  out << "\n[equilibrium]\n";
  out << "d = " << fmt(sc.equilibrium.d) << "\n";
  out << "eps = " << fmt(sc.equilibrium.eps) << "\n";
  out << "max_iter = " << sc.equilibrium.max_iter << "\n";
  out << "t_e = " << fmt(sc.equilibrium.t_e) << "\n";

  out << "\n[optimizer]\n";
  out << "n_ants = " << sc.optimizer.n_ants << "\n";
  out << "n_antlions = " << sc.optimizer.n_antlions << "\n";
  out << "t_max = " << sc.optimizer.t_max << "\n";
  out << "lower = " << fmt_list(sc.optimizer.lower) << "\n";
  out << "upper = " << fmt_list(sc.optimizer.upper) << "\n";
}

std::string scenario_to_string(const Scenario& scenario) {
  std::ostringstream out;
  write_scenario(out, scenario);
  return out.str();
}

}  // namespace queuenet
