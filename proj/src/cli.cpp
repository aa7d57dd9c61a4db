#include "vspace/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vspace/algorithms.hpp"
#include "vspace/errors.hpp"
#include "vspace/explicit.hpp"
#include "vspace/grid_uso.hpp"
#include "vspace/instances.hpp"
#include "vspace/io.hpp"
#include "vspace/lp_type.hpp"

namespace vs::cli {

using nlohmann::json;

namespace {

enum class Format { text, json, csv };

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> delta;
  Format format = Format::text;
  std::string out_path;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string braces(const std::vector<std::string>& names, Mask m) { return "{" + io::subset_key(names, m) + "}"; }
std::string braces(const std::vector<std::string>& names, const ConstraintSet& s) {
  return "{" + io::subset_key(names, s) + "}";
}

json name_list(const std::vector<std::string>& names, const ConstraintSet& s) {
  json arr = json::array();
  s.for_each([&](ConstraintSet::Index h) { arr.push_back(names[h]); });
  return arr;
}

json name_list(const std::vector<std::string>& names, Mask m) {
  json arr = json::array();
  for (; m != 0; m &= m - 1) arr.push_back(names[static_cast<std::size_t>(std::countr_zero(m))]);
  return arr;
}

ExplicitViolatorSpace abstract_to_space(const AbstractLpTable& t) { return violator_map_of_abstract(t); }

ExplicitViolatorSpace concrete_to_space(const ConcreteLpProblem& p) {
  auto t = concrete_to_abstract(p);
  return violator_map_of_abstract(t);
}

struct LoadedOracle {
  std::shared_ptr<const ViolationOracle> oracle;
  std::vector<std::string> names;
};

LoadedOracle make_oracle(const io::Instance& inst, std::optional<std::size_t> delta) {
  LoadedOracle lo;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExplicitViolatorSpace>) {
          lo.names = x.names();
          lo.oracle = std::make_shared<TableOracle>(std::make_shared<const ExplicitViolatorSpace>(x), delta);
        } else if constexpr (std::is_same_v<T, AbstractLpTable>) {
          auto space = std::make_shared<const ExplicitViolatorSpace>(abstract_to_space(x));
          lo.names = space->names();
          lo.oracle = std::make_shared<TableOracle>(space, delta);
        } else if constexpr (std::is_same_v<T, ConcreteLpProblem>) {
          auto space = std::make_shared<const ExplicitViolatorSpace>(concrete_to_space(x));
          lo.names = space->names();
          lo.oracle = std::make_shared<TableOracle>(space, delta);
        } else if constexpr (std::is_same_v<T, io::NamedUso>) {
          lo.names = x.names;
          auto o = std::make_shared<UsoOracle>(x.uso, delta);
          lo.oracle = o;
        } else if constexpr (std::is_same_v<T, PointSet>) {
          lo.names = x.names;
          lo.oracle = std::make_shared<MiniballOracle>(x, delta);
        } else {
          lo.names = x.names;
          lo.oracle = std::make_shared<Lp2dOracle>(x, delta);
        }
      },
      inst);
  return lo;
}

/// Explicit table of any instance; tabulates oracle-backed kinds (n <= 16).
ExplicitViolatorSpace explicit_of(const io::Instance& inst) {
  if (const auto* e = std::get_if<ExplicitViolatorSpace>(&inst)) return *e;
  if (const auto* a = std::get_if<AbstractLpTable>(&inst)) return abstract_to_space(*a);
  if (const auto* c = std::get_if<ConcreteLpProblem>(&inst)) return concrete_to_space(*c);
  const auto lo = make_oracle(inst, std::nullopt);
  return tabulate(*lo.oracle, lo.names);
}

// ---- check ----

struct Report {
  Report() = default;
  Report(std::string b, int c = kOk, std::string w = {}) : body(std::move(b)), code(c), warning(std::move(w)) {}

  std::string body;
  int code = kOk;
  std::string warning;  // printed to the diagnostic stream
};

// Exhaustive locality checks grow like 3^n.
constexpr std::size_t kCheckWarnSize = 16;

Report cmd_check(const std::string& path, const Common& c) {
  json j;
  std::string text;
  std::string warning;
  bool ok = true;
  std::optional<io::Instance> inst;
  try {
    inst = io::load(path);
  } catch (const InvalidInstance& e) {
    // Structurally broken instances (e.g. an edge oriented both ways) fail the check.
    j = {{"ok", false}, {"error", e.what()}};
    text = std::string("fail: ") + e.what() + "\n";
    return {c.format == Format::json ? j.dump(2) + "\n" : text, kFailure};
  }
  const std::string kind = io::kind_name(*inst);
  j["kind"] = kind;

  if (auto* u = std::get_if<io::NamedUso>(&*inst)) {
    const auto w = validate_uso(*u->uso);
    ok = !w;
    if (w) {
      j["witness"] = {{"subgrid", name_list(u->names, w->G)}, {"sinks", w->sinks}};
      text = "fail: subgrid " + braces(u->names, w->G) + " has " + std::to_string(w->sinks) + " sinks\n";
    }
  } else if (const auto* a = std::get_if<AbstractLpTable>(&*inst)) {
    const auto w = check_abstract_axioms(*a);
    ok = !w;
    if (w) {
      const std::string axiom = w->axiom == LpAxiom::monotonicity ? "monotonicity" : "locality";
      j["witness"] = {{"axiom", axiom}, {"F", name_list(a->names, w->F)}, {"G", name_list(a->names, w->G)}};
      text = "fail: " + axiom + " F=" + braces(a->names, w->F) + " G=" + braces(a->names, w->G);
      if (w->h) {
        j["witness"]["h"] = a->names[*w->h];
        text += " h=" + a->names[*w->h];
      }
      text += "\n";
    }
  } else {
    const ExplicitViolatorSpace space = explicit_of(*inst);
    if (space.size() > kCheckWarnSize) {
      warning = "warning: checking " + std::to_string(space.size()) + " constraints exhaustively may take long\n";
    }
    const auto w = check_axioms(space);
    ok = !w;
    if (w) {
      const std::string axiom = w->axiom == Axiom::consistency ? "consistency" : "locality";
      j["witness"] = {{"axiom", axiom}, {"F", name_list(space.names(), w->F)}, {"G", name_list(space.names(), w->G)}};
      text = "fail: " + axiom + " F=" + braces(space.names(), w->F) + " G=" + braces(space.names(), w->G) + "\n";
    }
  }
  j["ok"] = ok;
  if (ok) text = "ok: " + kind + "\n";
  return {c.format == Format::json ? j.dump(2) + "\n" : text, ok ? kOk : kFailure, warning};
}

// ---- solve ----

Report cmd_solve(const std::string& path, const std::string& algo, const Common& c) {
  const auto inst = io::load(path);
  const auto lo = make_oracle(inst, c.delta);
  const ViolationOracle& oracle = *lo.oracle;
  Rng rng(c.seed);
  BasisResult res;
  if (algo == "trivial") {
    res.stats.rng_seed = c.seed;
    res.basis = trivial_basis(oracle, oracle.ground_set(), &res.stats);
  } else if (algo == "clarkson2") {
    res = basis2(oracle, oracle.ground_set(), rng);
  } else {
    res = solve(oracle, rng);
  }
  const ConstraintSet viol = oracle.violator_set(res.basis);
  const auto& s = res.stats;

  if (c.format == Format::json) {
    json j = {{"algorithm", algo},
              {"seed", c.seed},
              {"delta", oracle.delta()},
              {"basis", name_list(lo.names, res.basis)},
              {"violators", name_list(lo.names, viol)},
              {"primitive_calls", s.primitive_calls},
              {"loop_iterations", s.loop_iterations},
              {"basis2_calls", s.basis2_calls},
              {"trivial_calls", s.trivial_calls},
              {"max_w_augmentations", s.max_w_augmentations},
              {"max_successful_reweightings", s.max_successful_reweightings}};
    if (const auto cost = oracle.internal_cost()) j[cost->label] = cost->count;
    return {j.dump(2) + "\n", kOk};
  }
  if (c.format == Format::csv) {
    std::string out = "algorithm,seed,delta,basis,primitive_calls,loop_iterations,basis2_calls,trivial_calls\n";
    out += algo + "," + std::to_string(c.seed) + "," + std::to_string(oracle.delta()) + ",\"" +
           io::subset_key(lo.names, res.basis) + "\"," + std::to_string(s.primitive_calls) + "," +
           std::to_string(s.loop_iterations) + "," + std::to_string(s.basis2_calls) + "," +
           std::to_string(s.trivial_calls) + "\n";
    return {out, kOk};
  }
  std::ostringstream o;
  o << "algorithm: " << algo << "\n"
    << "seed: " << c.seed << "\n"
    << "delta: " << oracle.delta() << "\n"
    << "basis: " << braces(lo.names, res.basis) << "\n"
    << "violators: " << braces(lo.names, viol) << "\n"
    << "primitive_calls: " << s.primitive_calls << "\n"
    << "loop_iterations: " << s.loop_iterations << "\n"
    << "basis2_calls: " << s.basis2_calls << "\n"
    << "trivial_calls: " << s.trivial_calls << "\n"
    << "max_w_augmentations: " << s.max_w_augmentations << "\n"
    << "max_successful_reweightings: " << s.max_successful_reweightings << "\n";
  if (const auto cost = oracle.internal_cost()) o << cost->label << ": " << cost->count << "\n";
  return {o.str(), kOk};
}

// ---- structure ----

struct ProbeArgs {
  std::uint64_t samples = 0;
  std::size_t n = 4;
  std::size_t max_dimension = 2;
};

// Random search for cyclic violator spaces of bounded dimension. Reports what
// it saw; finding nothing proves nothing.
Report cmd_probe(const ProbeArgs& a, const Common& c) {
  if (c.format == Format::csv) throw ContractViolation("structure supports --format text or json");
  if (a.max_dimension == 0) throw ParseError("--max-dim must be positive");
  Rng rng(c.seed);
  const CyclicProbe probe = probe_cyclic(a.n, a.max_dimension, a.samples, rng);
  if (c.format == Format::json) {
    json j = {{"n", a.n}, {"max_dimension", a.max_dimension}, {"samples", probe.samples},
              {"seed", c.seed}, {"cyclic", probe.cyclic}};
    if (probe.first_cyclic) j["example"] = json::parse(io::to_json(*probe.first_cyclic));
    return {j.dump(2) + "\n", kOk};
  }
  std::ostringstream o;
  o << "n: " << a.n << "\nmax dimension: " << a.max_dimension << "\nsamples: " << probe.samples
    << "\nseed: " << c.seed << "\ncyclic: " << probe.cyclic << "\n";
  if (probe.first_cyclic) o << "first cyclic example:\n" << io::to_json(*probe.first_cyclic);
  return {o.str(), kOk};
}

Report cmd_structure(const std::string& path, const Common& c) {
  if (c.format == Format::csv) throw ContractViolation("structure supports --format text or json");
  const auto inst = io::load(path);
  const ExplicitViolatorSpace space = explicit_of(inst);
  const auto& names = space.names();
  const BasisStructure s = structure(space);
  std::optional<ConcreteLpProblem> concrete;
  if (s.acyclic) concrete = to_concrete(space, s);
  const auto label = [&](std::size_t cls) { return class_label(space, s, cls); };

  if (c.format == Format::json) {
    json j;
    j["names"] = names;
    j["dimension"] = combinatorial_dimension(space);
    json bases = json::array();
    for (Mask b : s.bases) bases.push_back(name_list(names, b));
    j["bases"] = std::move(bases);
    json classes = json::array();
    for (std::size_t i = 0; i < s.classes.size(); ++i) {
      json members = json::array();
      for (Mask b : s.classes[i]) members.push_back(name_list(names, b));
      classes.push_back({{"members", std::move(members)}, {"violators", name_list(names, s.class_violators[i])}});
    }
    j["classes"] = std::move(classes);
    j["acyclic"] = s.acyclic;
    if (s.acyclic) {
      json ext = json::array();
      for (auto cls : s.linear_extension) ext.push_back(label(cls));
      j["linear_extension"] = std::move(ext);
      json table = json::object();
      for (std::size_t h = 0; h < names.size(); ++h) {
        json row = json::array();
        for (auto p : concrete->constraints[h]) row.push_back(concrete->points[p]);
        table[names[h]] = std::move(row);
      }
      j["s_table"] = std::move(table);
    } else {
      json cyc = json::array();
      for (auto cls : s.cycle) cyc.push_back(label(cls));
      j["cycle"] = std::move(cyc);
    }
    return {j.dump(2) + "\n", kOk};
  }

  std::ostringstream o;
  o << "constraints:";
  for (const auto& n : names) o << " " << n;
  o << "\ncombinatorial dimension: " << combinatorial_dimension(space) << "\n";
  o << "bases (" << s.bases.size() << "):";
  for (Mask b : s.bases) o << " " << braces(names, b);
  o << "\nclasses (" << s.classes.size() << "):\n";
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    o << "  [" << i << "]";
    for (Mask b : s.classes[i]) o << " " << braces(names, b);
    o << "  V=" << braces(names, s.class_violators[i]) << "\n";
  }
  o << "acyclic: " << (s.acyclic ? "true" : "false") << "\n";
  if (s.acyclic) {
    o << "linear extension:";
    for (std::size_t i = 0; i < s.linear_extension.size(); ++i) {
      o << (i ? " < " : " ") << label(s.linear_extension[i]);
    }
    o << "\nS(h):\n";
    for (std::size_t h = 0; h < names.size(); ++h) {
      o << "  " << names[h] << ":";
      for (auto p : concrete->constraints[h]) o << " " << concrete->points[p];
      o << "\n";
    }
  } else {
    o << "cycle:";
    for (auto cls : s.cycle) o << " " << label(cls) << " <=0";
    o << " " << label(s.cycle.front()) << "\n";
  }
  return {o.str(), kOk};
}

// ---- uso ----

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ParseError("block sizes must be positive integers separated by commas: '" + text + "'");
    }
  }
  if (sizes.empty()) throw ParseError("no block sizes given");
  return sizes;
}

struct UsoArgs {
  std::string path;
  std::string family = "coordinate";
  std::string blocks = "3,2,2";
  std::string base = "2,2";
  bool tabulate = false;
};

Report cmd_uso(const UsoArgs& a, const Common& c) {
  if (!a.path.empty()) {
    auto inst = io::load(a.path);
    const auto* u = std::get_if<io::NamedUso>(&inst);
    if (!u) throw ParseError("'" + a.path + "' is not a USO file");
    const GridUso& g = *u->uso;
    std::optional<bool> valid;
    if (g.size() <= kMaxValidateSize) valid = !validate_uso(g);
    if (valid && !*valid) {
      return {c.format == Format::json ? json{{"valid", false}}.dump(2) + "\n" : "valid: false\n", kFailure};
    }
    const Vertex sink = g.global_sink();
    const auto cycle = find_directed_cycle(g);
    if (c.format == Format::json) {
      json j = {{"blocks", g.block_count()},
                {"vertices", g.partition().vertex_count()},
                {"global_sink", name_list(u->names, sink.as_set(g.size()))},
                {"cyclic", cycle.has_value()}};
      j["valid"] = valid ? json(*valid) : json("unchecked");
      if (cycle) {
        json cyc = json::array();
        for (const auto& v : *cycle) cyc.push_back(name_list(u->names, v.as_set(g.size())));
        j["cycle"] = std::move(cyc);
      }
      return {j.dump(2) + "\n", kOk};
    }
    std::ostringstream o;
    o << "blocks: " << g.block_count() << "\nvertices: " << g.partition().vertex_count()
      << "\nvalid: " << (valid ? (*valid ? "true" : "false") : "unchecked (n > 16)")
      << "\nglobal sink: " << braces(u->names, sink.as_set(g.size())) << "\ncyclic: " << (cycle ? "true" : "false")
      << "\n";
    if (cycle) {
      o << "cycle:";
      for (const auto& v : *cycle) o << " " << braces(u->names, v.as_set(g.size())) << " ->";
      o << " " << braces(u->names, cycle->front().as_set(g.size())) << "\n";
    }
    return {o.str(), kOk};
  }

  Rng rng(c.seed);
  std::shared_ptr<const GridUso> uso;
  if (a.family == "cyclic") {
    uso = std::make_shared<const GridUso>(cyclic_cube_uso());
  } else {
    const auto partition = GridPartition::consecutive(parse_sizes(a.blocks));
    if (a.family == "coordinate") {
      uso = std::make_shared<const GridUso>(random_coordinate_order_uso(partition, rng));
    } else if (a.family == "random") {
      uso = std::make_shared<const GridUso>(random_uso(partition, rng));
    } else {
      auto base = std::make_shared<const GridUso>(random_uso(GridPartition::consecutive(parse_sizes(a.base)), rng));
      uso = std::make_shared<const GridUso>(inflate_uso(base, partition, rng));
    }
  }
  const io::NamedUso named{uso, default_names(uso->size())};
  if (a.tabulate) {
    const UsoOracle oracle(uso, c.delta);
    return {io::to_json(tabulate(oracle, named.names)), kOk};
  }
  if (uso->partition().vertex_count() > io::kMaxUsoFileVertices) {
    throw SizeGuard("USO file output is limited to 65536 vertices");
  }
  return {io::to_json(named), kOk};
}

// ---- bench ----

struct BenchArgs {
  std::string family = "coordinate";
  std::size_t blocks = 2;
  std::string sizes = "64,128,256,512";
  std::string algos = "trivial,clarkson1,clarkson2";
  std::size_t trials = 20;
};

struct TrialResult {
  std::uint64_t calls = 0;
  std::uint64_t iterations = 0;
};

TrialResult bench_trial(const BenchArgs& b, std::size_t n, const std::string& algo, const Rng& stream) {
  Rng gen = stream;
  std::vector<std::size_t> sizes(b.blocks, n / b.blocks);
  for (std::size_t i = 0; i < n % b.blocks; ++i) ++sizes[i];
  const auto partition = GridPartition::consecutive(sizes);
  std::shared_ptr<const GridUso> uso;
  if (b.family == "coordinate") {
    uso = std::make_shared<const GridUso>(random_coordinate_order_uso(partition, gen));
  } else {
    auto base = std::make_shared<const GridUso>(
        random_uso(GridPartition::consecutive(std::vector<std::size_t>(b.blocks, 2)), gen));
    uso = std::make_shared<const GridUso>(inflate_uso(base, partition, gen));
  }
  const UsoOracle oracle(uso);
  Rng rng = stream.split(1);
  BasisResult res;
  if (algo == "trivial") {
    res.basis = trivial_basis(oracle, oracle.ground_set(), &res.stats);
  } else if (algo == "clarkson2") {
    res = basis2(oracle, oracle.ground_set(), rng);
  } else {
    res = basis1(oracle, oracle.ground_set(), rng);
  }
  if (!oracle.violator_set(res.basis).empty()) throw InvalidInstance("solver returned a non-basis");
  return {res.stats.primitive_calls, res.stats.loop_iterations};
}

Report cmd_bench(const BenchArgs& b, const Common& c) {
  if (b.family != "coordinate" && b.family != "inflated") throw ParseError("unknown bench family '" + b.family + "'");
  if (b.blocks == 0) throw ParseError("--blocks must be positive");
  if (b.trials == 0) throw ParseError("--trials must be positive");
  const auto sizes = parse_sizes(b.sizes);
  std::vector<std::string> algos;
  {
    std::stringstream ss(b.algos);
    std::string a;
    while (std::getline(ss, a, ',')) {
      if (a == "auto") a = "clarkson1";
      if (a != "trivial" && a != "clarkson1" && a != "clarkson2") throw ParseError("unknown algorithm '" + a + "'");
      algos.push_back(a);
    }
  }
  struct Row {
    std::size_t n;
    std::string algo;
    double calls;
    double iterations;
  };
  std::vector<Row> rows;
  const Rng master(c.seed);
  for (std::size_t n : sizes) {
    if (n < 2 * b.blocks) throw ParseError("every block needs at least two elements");
    for (const auto& algo : algos) {
      std::vector<TrialResult> results(b.trials);
      std::vector<std::exception_ptr> errors(b.trials);
      const auto total = static_cast<std::int64_t>(b.trials);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t t = 0; t < total; ++t) {
        try {
          const Rng stream = master.split(n).split(static_cast<std::uint64_t>(t));
          results[static_cast<std::size_t>(t)] = bench_trial(b, n, algo, stream);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      double calls = 0;
      double iterations = 0;
      for (const auto& r : results) {
        calls += static_cast<double>(r.calls);
        iterations += static_cast<double>(r.iterations);
      }
      rows.push_back({n, algo, calls / static_cast<double>(b.trials), iterations / static_cast<double>(b.trials)});
    }
  }

  if (c.format == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n},
                     {"delta", b.blocks},
                     {"algo", r.algo},
                     {"mean_primitive_calls", fixed(r.calls, 2)},
                     {"mean_iterations", fixed(r.iterations, 2)},
                     {"trials", b.trials},
                     {"seed", c.seed}});
    }
    return {json{{"family", b.family}, {"rows", arr}}.dump(2) + "\n", kOk};
  }
  std::string out = "n,delta,algo,mean_primitive_calls,mean_iterations,trials,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(b.blocks) + "," + r.algo + "," + fixed(r.calls, 2) + "," +
           fixed(r.iterations, 2) + "," + std::to_string(b.trials) + "," + std::to_string(c.seed) + "\n";
  }
  return {out, kOk};
}

// ---- sampling ----

struct SamplingArgs {
  std::string path;
  std::size_t r = 1;
  std::size_t trials = 10000;
  std::string w;
};

constexpr std::uint64_t kMaxExactSubsets = 2'000'000;

std::optional<Rational> exact_expectation(const ViolationOracle& oracle, const ConstraintSet& W, std::size_t r) {
  const std::size_t n = oracle.size();
  // C(n, r) without overflow
  long double subsets = 1;
  for (std::size_t i = 0; i < r; ++i) subsets = subsets * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
  if (subsets > static_cast<long double>(kMaxExactSubsets)) return std::nullopt;
  const auto pool = oracle.ground_set().members();
  mpz_class sum = 0;
  mpz_class count = 0;
  for_each_combination(pool, r, [&](const std::vector<ConstraintSet::Index>& chosen) {
    const ConstraintSet U = W | ConstraintSet(n, chosen);
    sum += static_cast<unsigned long>((oracle.violator_set(U) - U).size());
    ++count;
    return true;
  });
  Rational q(sum, count);
  q.canonicalize();
  return q;
}

Report cmd_sampling(const SamplingArgs& a, const Common& c) {
  const auto inst = io::load(a.path);
  const auto lo = make_oracle(inst, c.delta);
  ConstraintSet W(lo.oracle->size());
  if (!a.w.empty()) {
    std::stringstream ss(a.w);
    std::string part;
    while (std::getline(ss, part, ',')) {
      auto it = std::find(lo.names.begin(), lo.names.end(), part);
      if (it == lo.names.end()) throw ParseError("unknown constraint '" + part + "' in --w");
      W.insert(static_cast<std::size_t>(it - lo.names.begin()));
    }
  }
  if (a.r >= lo.oracle->size()) throw ParseError("--r must be smaller than the number of constraints");
  if (a.trials == 0) throw ParseError("--trials must be positive");
  const SamplingReport rep = sampling_check(*lo.oracle, W, a.r, a.trials, c.seed);
  const auto exact = exact_expectation(*lo.oracle, W, a.r);

  if (c.format == Format::json) {
    json j = {{"r", rep.r},           {"trials", rep.trials},       {"seed", rep.seed},
              {"delta", lo.oracle->delta()}, {"mean", fixed(rep.mean, 6)}, {"stddev", fixed(rep.stddev, 6)},
              {"bound", fixed(rep.bound, 6)}, {"pass", rep.pass}};
    if (exact) j["exact_mean"] = exact->get_str();
    return {j.dump(2) + "\n", kOk};
  }
  if (c.format == Format::csv) {
    std::string out = "r,trials,seed,delta,mean,stddev,bound,exact_mean,pass\n";
    out += std::to_string(rep.r) + "," + std::to_string(rep.trials) + "," + std::to_string(rep.seed) + "," +
           std::to_string(lo.oracle->delta()) + "," + fixed(rep.mean, 6) + "," + fixed(rep.stddev, 6) + "," +
           fixed(rep.bound, 6) + "," + (exact ? exact->get_str() : "") + "," + (rep.pass ? "true" : "false") + "\n";
    return {out, kOk};
  }
  std::ostringstream o;
  o << "r: " << rep.r << "\ntrials: " << rep.trials << "\nseed: " << rep.seed << "\ndelta: " << lo.oracle->delta()
    << "\nmean: " << fixed(rep.mean, 6) << "\nstddev: " << fixed(rep.stddev, 6) << "\nbound: " << fixed(rep.bound, 6)
    << "\n";
  if (exact) o << "exact mean: " << exact->get_str() << " (" << fixed(exact->get_d(), 6) << ")\n";
  o << "pass: " << (rep.pass ? "true" : "false") << "\n";
  return {o.str(), kOk};
}

void add_common(CLI::App* sub, Common& c, bool randomized) {
  static const std::map<std::string, Format> kFormats = {
      {"text", Format::text}, {"json", Format::json}, {"csv", Format::csv}};
  sub->add_option("--format", c.format, "Output format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  sub->add_option("--out", c.out_path, "Write output to this file instead of stdout");
  if (randomized) {
    sub->add_option("--seed", c.seed, "Random seed (default " + std::to_string(kDefaultSeed) + ")");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Violator spaces: axiom checks, structure reports and Clarkson-type basis computation", "vsp"};
  app.require_subcommand(1);

  Common common;
  std::string path;
  std::string algo = "auto";
  std::size_t delta_value = 0;

  auto* check = app.add_subcommand("check", "Check the axioms of an instance file");
  check->add_option("path", path, "Instance file")->required();
  add_common(check, common, false);

  auto* solve_cmd = app.add_subcommand("solve", "Find a basis of the whole ground set");
  solve_cmd->add_option("path", path, "Instance file")->required();
  solve_cmd->add_option("--algo", algo, "trivial, clarkson1, clarkson2 or auto")
      ->check(CLI::IsMember({"trivial", "clarkson1", "clarkson2", "auto"}));
  solve_cmd->add_option("--delta", delta_value, "Override the combinatorial-dimension hint")->check(CLI::PositiveNumber);
  add_common(solve_cmd, common, true);

  ProbeArgs probe_args;
  auto* structure_cmd = app.add_subcommand("structure", "Bases, equivalence classes and acyclicity");
  auto* structure_path = structure_cmd->add_option("path", path, "Instance file");
  auto* probe_opt = structure_cmd->add_option("--probe", probe_args.samples,
                                              "Instead of reading a file, sample this many random violator spaces "
                                              "and count the cyclic ones")
                        ->check(CLI::PositiveNumber)
                        ->excludes(structure_path);
  structure_cmd->add_option("--n", probe_args.n, "Ground-set size for --probe (at most 12)")->needs(probe_opt);
  structure_cmd->add_option("--max-dim", probe_args.max_dimension, "Largest basis size for --probe")->needs(probe_opt);
  structure_cmd->add_option("--seed", common.seed, "Random seed for --probe")->needs(probe_opt);
  add_common(structure_cmd, common, false);

  UsoArgs uso_args;
  auto* uso_cmd = app.add_subcommand("uso", "Generate a grid USO, or summarize a USO file");
  uso_cmd->add_option("path", uso_args.path, "USO file to summarize");
  uso_cmd->add_option("--family", uso_args.family, "coordinate, random, cyclic or inflated")
      ->check(CLI::IsMember({"coordinate", "random", "cyclic", "inflated"}));
  uso_cmd->add_option("--blocks", uso_args.blocks, "Block sizes, e.g. 3,2,2");
  uso_cmd->add_option("--base", uso_args.base, "Block sizes of the random base grid (inflated family)");
  uso_cmd->add_flag("--tabulate", uso_args.tabulate, "Emit the induced explicit violator space instead");
  uso_cmd->add_option("--delta", delta_value, "Override the combinatorial-dimension hint")->check(CLI::PositiveNumber);
  add_common(uso_cmd, common, true);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Mean primitive calls on random grid-USO families");
  bench_cmd->add_option("--family", bench_args.family, "coordinate or inflated")
      ->check(CLI::IsMember({"coordinate", "inflated"}));
  bench_cmd->add_option("--blocks", bench_args.blocks, "Number of blocks (delta)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--n", bench_args.sizes, "Comma-separated ground-set sizes");
  bench_cmd->add_option("--algo", bench_args.algos, "Comma-separated algorithms");
  bench_cmd->add_option("--trials", bench_args.trials, "Trials per row")->check(CLI::PositiveNumber);
  add_common(bench_cmd, common, true);

  SamplingArgs sampling_args;
  auto* sampling_cmd = app.add_subcommand("sampling", "Mean violator count of random r-samples against its bound");
  sampling_cmd->add_option("path", sampling_args.path, "Instance file")->required();
  sampling_cmd->add_option("--r", sampling_args.r, "Sample size")->required();
  sampling_cmd->add_option("--trials", sampling_args.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  sampling_cmd->add_option("--w", sampling_args.w, "Comma-separated names of the fixed set W");
  sampling_cmd->add_option("--delta", delta_value, "Override the combinatorial-dimension hint")->check(CLI::PositiveNumber);
  add_common(sampling_cmd, common, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }
  if (delta_value > 0) common.delta = delta_value;

  Report report;
  try {
    if (check->parsed()) {
      report = cmd_check(path, common);
    } else if (solve_cmd->parsed()) {
      report = cmd_solve(path, algo == "auto" ? "clarkson1" : algo, common);
    } else if (structure_cmd->parsed()) {
      if (probe_args.samples > 0) {
        report = cmd_probe(probe_args, common);
      } else if (path.empty()) {
        throw ParseError("structure needs an instance file or --probe");
      } else {
        report = cmd_structure(path, common);
      }
    } else if (uso_cmd->parsed()) {
      report = cmd_uso(uso_args, common);
    } else if (bench_cmd->parsed()) {
      if (common.format == Format::text) common.format = Format::csv;
      report = cmd_bench(bench_args, common);
    } else {
      report = cmd_sampling(sampling_args, common);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const ContractViolation& e) {
    err << "invalid request: " << e.what() << "\n";
    return kParseError;
  } catch (const SizeGuard& e) {
    err << "size guard: " << e.what() << "\n";
    return kSizeGuard;
  } catch (const InvalidInstance& e) {
    err << "invalid instance: " << e.what() << "\n";
    return kFailure;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }

  err << report.warning;
  if (common.out_path.empty()) {
    out << report.body;
  } else {
    try {
      io::write_file(common.out_path, report.body);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return kFailure;
    }
  }
  return report.code;
}

}  // namespace vs::cli
