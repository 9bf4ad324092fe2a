#include "tfab/cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"
#include "tfab/cornerlab.hpp"
#include "tfab/dsl.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tfab {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  bool json = false;
  std::string file;
  std::string elt;
  std::vector<std::string> elts;
  std::uint64_t prime = 0;
  unsigned bound = 5;
  std::uint64_t seed = 0;
  std::string type;
  std::size_t cap = kDefaultEndRankCap;
  int example = 0;
  std::string action;
  int n = 4;
  std::size_t summands = 20;
  std::string out_path;
};

// Thrown for unreadable files and similar invocation problems.
struct UsageError {
  std::string msg;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t default_seed() {
  const char* s = std::getenv("TFAB_SEED");
  if (!s || !*s) return 0;
  char* end = nullptr;
  auto v = std::strtoull(s, &end, 10);
  if (*end) throw UsageError{"TFAB_SEED must be a non-negative integer"};
  return v;
}

// Parse failure inside an --elt expression.
struct ExprError {
  SourcePos pos;
  std::string msg;
};

struct Loaded {
  PresentationDocument doc;
  Group g;
};

Loaded load(const std::string& path) {
  Loaded l;
  l.doc = parse_presentation(read_file(path));
  l.g = l.doc.to_group();
  return l;
}

Element elt(const Loaded& l, const std::string& text) {
  try {
    return parse_element(l.doc, text);
  } catch (const PositionedError& e) {
    throw ExprError{e.pos(), e.message()};
  }
}

Json header(const std::string& command) {
  Json j;
  j["schema"] = kJsonSchema;
  j["command"] = command;
  return j;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

std::string ext_str(const ExtNat& e) { return e.str(); }

std::string types_json_str(const TypeMultiset& t) { return types_str(t); }

std::vector<std::string> directions_of(const Loaded& l, const Group& h) {
  std::vector<std::string> out;
  for (const auto& b : h.base()) out.push_back(print_element(l.doc, b.direction));
  return out;
}

// ---------------------------------------------------------------------------
// Commands over presentation files

int cmd_validate(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  std::vector<std::string> universe;
  for (auto p : l.g.universe()) universe.push_back(std::to_string(p));
  std::vector<std::string> types;
  for (std::size_t i = 0; i < l.g.rank(); ++i) types.push_back(l.g.base_type(i).str());
  if (o.json) {
    Json j = header("validate");
    j["name"] = l.doc.name;
    j["rank"] = l.g.rank();
    j["universe"] = universe;
    j["base_types"] = types;
    j["relations"] = l.g.relations().size();
    emit(out, j);
  } else {
    out << "group " << l.doc.name << ": valid, rank " << l.g.rank() << ", " << l.g.relations().size() << " relations\n";
    out << "universe:";
    for (const auto& p : universe) out << " " << p;
    out << "\n";
    for (std::size_t i = 0; i < types.size(); ++i) out << "  " << l.doc.base[i].id << " : type " << types[i] << "\n";
  }
  return kExitTrue;
}

int cmd_member(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  Element x = elt(l, o.elt);
  bool m = l.g.member(x);
  if (o.json) {
    Json j = header("member");
    j["element"] = print_element(l.doc, x);
    j["member"] = m;
    emit(out, j);
  } else {
    out << print_element(l.doc, x) << (m ? " is" : " is not") << " in " << l.doc.name << "\n";
  }
  return m ? kExitTrue : kExitFalse;
}

int cmd_height(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  Element x = elt(l, o.elt);
  if (!is_prime(static_cast<Prime>(o.prime))) throw UsageError{std::to_string(o.prime) + " is not prime"};
  ExtNat h = l.g.height(x, o.prime);
  if (o.json) {
    Json j = header("height");
    j["element"] = print_element(l.doc, x);
    j["prime"] = o.prime;
    j["height"] = ext_str(h);
    emit(out, j);
  } else {
    out << "h_" << o.prime << "(" << print_element(l.doc, x) << ") = " << ext_str(h) << "\n";
  }
  return kExitTrue;
}

int cmd_type(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  Element x = elt(l, o.elt);
  Characteristic chi = l.g.characteristic_of(x);
  TypeClass t = l.g.type_of(x);
  if (o.json) {
    Json j = header("type");
    j["element"] = print_element(l.doc, x);
    j["characteristic"] = chi.str();
    j["type"] = t.str();
    emit(out, j);
  } else {
    out << "characteristic " << chi.str() << "\ntype " << t.str() << "\n";
  }
  return kExitTrue;
}

int cmd_purify(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  std::vector<Element> xs;
  for (const auto& e : o.elts) xs.push_back(elt(l, e));
  Group p = purify(l.g, xs);
  auto doc = PresentationDocument::from_group(l.doc.name + "_pure", p);
  if (o.json) {
    Json j = header("purify");
    j["rank"] = p.rank();
    j["directions"] = directions_of(l, p);
    j["presentation"] = print_presentation(doc);
    emit(out, j);
  } else {
    out << "pure closure of rank " << p.rank() << "\n";
    auto dirs = directions_of(l, p);
    for (std::size_t i = 0; i < dirs.size(); ++i) out << "  " << doc.base[i].id << " = " << dirs[i] << "\n";
    out << print_presentation(doc);
  }
  return kExitTrue;
}

int cmd_decompose(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  auto r = main_decomposition(l.g, o.bound, o.seed);
  bool verified = verify_report(l.g, r);
  if (o.json) {
    Json j = header("decompose");
    j["bound"] = o.bound;
    j["seed"] = o.seed;
    j["cd_types"] = types_json_str(r.cd_types);
    Json sums = Json::array();
    for (const auto& e : r.summands)
      sums.push_back({{"line", print_element(l.doc, e.f.target.base()[0].direction)}, {"characteristic", e.f.target.base()[0].chi.str()}, {"type", e.type.str()}});
    j["summands"] = sums;
    j["complement_rank"] = r.complement_rank;
    j["complement_directions"] = directions_of(l, r.complement);
    j["candidates_examined"] = r.candidates_examined;
    j["verified"] = verified;
    emit(out, j);
  } else {
    out << "completely decomposable part: " << types_json_str(r.cd_types) << "\n";
    for (const auto& e : r.summands)
      out << "  line " << print_element(l.doc, e.f.target.base()[0].direction) << " : " << e.f.target.base()[0].chi.str() << "\n";
    out << "complement rank " << r.complement_rank << " (no rank-1 summand within bound " << o.bound << ")\n";
    for (const auto& d : directions_of(l, r.complement)) out << "  " << d << "\n";
    out << "candidates examined: " << r.candidates_examined << "\nverified: " << (verified ? "yes" : "no") << "\n";
  }
  return verified ? kExitTrue : kExitFalse;
}

int cmd_clipped(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  auto c = is_clipped(l.g, o.bound);
  if (o.json) {
    Json j = header("clipped");
    j["bound"] = o.bound;
    j["verdict"] = c.clipped_within_bound ? "ClippedWithinBound" : "HasRank1Summand";
    j["candidates_examined"] = c.candidates_examined;
    if (c.witness) {
      j["witness_line"] = print_element(l.doc, c.witness->f.target.base()[0].direction);
      j["witness_type"] = c.witness->type.str();
    }
    emit(out, j);
  } else if (c.clipped_within_bound) {
    out << "ClippedWithinBound: no rank-1 summand among " << c.candidates_examined << " candidates of max-norm <= " << o.bound << "\n";
  } else {
    out << "HasRank1Summand: line " << print_element(l.doc, c.witness->f.target.base()[0].direction) << " of type " << c.witness->type.str() << "\n";
  }
  return c.clipped_within_bound ? kExitTrue : kExitFalse;
}

int cmd_stein(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  TypeClass tau = TypeClass::parse(o.type);
  auto s = stein_socle_decomposition(l.g, tau);
  if (o.json) {
    Json j = header("stein");
    j["type"] = tau.str();
    j["socle_rank"] = s.socle.rank();
    j["k_rank"] = s.k.rank();
    j["k_directions"] = directions_of(l, s.k);
    j["b_rank"] = s.b.rank();
    j["b_directions"] = directions_of(l, s.b);
    emit(out, j);
  } else {
    out << "G(" << tau.str() << ") has rank " << s.socle.rank() << "\nK rank " << s.k.rank() << "\n";
    for (const auto& d : directions_of(l, s.k)) out << "  " << d << "\n";
    out << "B rank " << s.b.rank() << " (completely decomposable of type " << tau.str() << ")\n";
    for (const auto& d : directions_of(l, s.b)) out << "  " << d << "\n";
  }
  return kExitTrue;
}

std::string matrix_str(const QMat& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < m[i].size(); ++j) s += (j ? ", " : "") + rat_str(m[i][j]);
    s += "]";
  }
  return s + "]";
}

int cmd_end(const Options& o, std::ostream& out) {
  Loaded l = load(o.file);
  EndDescription e;
  IdempotentReport ir;
  try {
    e = end_integrality_basis(l.g, o.cap);
    ir = idempotent_search(l.g, o.bound, o.cap);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::RankCapExceeded) throw;
    if (o.json) {
      Json j = header("end");
      j["verdict"] = "RankCapExceeded";
      j["cap"] = o.cap;
      emit(out, j);
    } else {
      out << "rank " << l.g.rank() << " exceeds the cap " << o.cap << "\n";
    }
    return kExitInconclusive;
  }
  std::vector<std::string> units, idem;
  for (const auto& [r, c] : e.units) units.push_back(l.doc.base[c].id + "->" + l.doc.base[r].id);
  for (const auto& m : ir.idempotents) idem.push_back(matrix_str(m));
  if (o.json) {
    Json j = header("end");
    j["rank"] = e.rank;
    j["units"] = units;
    j["lattice_rank"] = e.lattice.size();
    j["bound"] = o.bound;
    j["idempotents"] = idem;
    j["only_trivial"] = ir.only_trivial();
    j["exhaustive_for_lines"] = ir.exhaustive_for_lines;
    emit(out, j);
  } else {
    out << "End(G) has rank " << e.lattice.size() << " over " << units.size() << " allowed units:";
    for (const auto& u : units) out << " " << u;
    out << "\nidempotents within bound " << o.bound << ": " << idem.size() << (ir.only_trivial() ? " (only 0 and 1)" : "") << "\n";
    for (const auto& m : idem) out << "  " << m << "\n";
  }
  return kExitTrue;
}

// ---------------------------------------------------------------------------
// Example commands

void write_or_print(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw UsageError{"cannot write " + o.out_path};
  f << text;
}

std::vector<std::pair<std::string, Group>> example_groups(const Options& o) {
  if (o.n < 1 || o.n > 16) throw UsageError{"--n must be between 1 and 16"};
  std::vector<std::pair<std::string, Group>> gs;
  if (o.example == 1) {
    auto ex = build_example1(Example1Config::defaults(static_cast<std::size_t>(o.n)));
    gs = {{"G", ex.g}, {"A", ex.a}, {"B", ex.b}, {"C", ex.c}, {"D", ex.d}};
  } else if (o.example == 2) {
    auto ex = build_example2(Example2Config::defaults(o.n));
    gs = {{"G", ex.g}, {"B", ex.b}, {"C", ex.c}};
    for (std::size_t i = 0; i < ex.e_blocks.size(); ++i) gs.emplace_back("E" + std::to_string(static_cast<int>(i) - o.n), ex.e_blocks[i]);
  } else {
    auto ex = build_example3(Example3Config::defaults(static_cast<std::size_t>(o.n)));
    gs = {{"G", ex.g}};
    for (std::size_t i = 0; i < ex.blocks.size(); ++i) gs.emplace_back("B" + std::to_string(i + 1), ex.blocks[i]);
  }
  return gs;
}

int cmd_example_build(const Options& o, std::ostream& out) {
  auto gs = example_groups(o);
  if (o.json) {
    Json j = header("example build");
    j["example"] = o.example;
    j["n"] = o.n;
    Json ps = Json::object();
    for (const auto& [name, g] : gs) ps[name] = print_presentation(PresentationDocument::from_group(name, g));
    j["presentations"] = ps;
    write_or_print(o, out, j.dump(2) + "\n");
  } else {
    // The file form holds G only so that it parses as one presentation.
    std::string text = print_presentation(PresentationDocument::from_group("G", gs.front().second));
    if (o.out_path.empty())
      for (std::size_t i = 1; i < gs.size(); ++i) text += "\n" + print_presentation(PresentationDocument::from_group(gs[i].first, gs[i].second));
    write_or_print(o, out, text);
  }
  return kExitTrue;
}

int report_out(const Options& o, std::ostream& out, const VerifyReport& r) {
  if (o.json) {
    Json j = header("example verify");
    j["example"] = o.example;
    j["n"] = o.n;
    j["bound"] = o.bound;
    if (o.example == 3) {
      j["summands"] = o.summands;
      j["seed"] = o.seed;
    }
    Json cs = Json::array();
    for (const auto& c : r.checks) cs.push_back({{"name", c.name}, {"status", c.ok ? "pass" : "fail"}, {"detail", c.detail}});
    j["checks"] = cs;
    j["all_ok"] = r.all_ok();
    write_or_print(o, out, j.dump(2) + "\n");
  } else {
    std::string text = r.example + " (n = " + std::to_string(o.n) + ")\n";
    for (const auto& c : r.checks) text += std::string(c.ok ? "  PASS  " : "  FAIL  ") + c.name + (c.detail.empty() ? "" : "  [" + c.detail + "]") + "\n";
    text += r.all_ok() ? "all checks passed\n" : "some checks failed\n";
    write_or_print(o, out, text);
  }
  return r.all_ok() ? kExitTrue : kExitFalse;
}

int cmd_example_verify(const Options& o, std::ostream& out) {
  if (o.n < 1 || o.n > 16) throw UsageError{"--n must be between 1 and 16"};
  VerifyReport r;
  if (o.example == 1)
    r = verify_example1(Example1Config::defaults(static_cast<std::size_t>(o.n)), o.bound);
  else if (o.example == 2)
    r = verify_example2(Example2Config::defaults(o.n), o.bound);
  else
    r = verify_example3(Example3Config::defaults(static_cast<std::size_t>(o.n)), o.summands, o.seed);
  return report_out(o, out, r);
}

std::string vec_str(const QVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + rat_str(v[i]);
  return s + ")";
}

int cmd_example_split(const Options& o, std::ostream& out) {
  if (o.n < 1 || o.n > 16) throw UsageError{"--n must be between 1 and 16"};
  Json j = header("example split");
  j["example"] = o.example;
  j["n"] = o.n;
  std::ostringstream text;
  bool ok = true;
  if (o.example == 1) {
    auto ex = build_example1(Example1Config::defaults(static_cast<std::size_t>(o.n)));
    auto r = main_decomposition(ex.g, o.bound, o.seed);
    ok = verify_report(ex.g, r);
    j["cd_types"] = types_str(r.cd_types);
    j["complement_rank"] = r.complement_rank;
    Json lines = Json::array();
    for (const auto& e : r.summands) lines.push_back(vec_str(e.f.target.base()[0].direction));
    j["lines"] = lines;
    text << "completely decomposable part " << types_str(r.cd_types) << ", clipped complement of rank " << r.complement_rank << "\n";
  } else if (o.example == 2) {
    auto d = example2_main_decomposition(Example2Config::defaults(o.n));
    ok = d.report.all_ok();
    Json alpha = Json::object(), t = Json::object(), z = Json::object();
    for (const auto& [n, a] : d.alpha) {
      alpha[std::to_string(n)] = a.get_str();
      t[std::to_string(n)] = vec_str(d.t.at(n));
      z[std::to_string(n)] = vec_str(d.z.at(n));
    }
    j["alpha"] = alpha;
    j["t"] = t;
    j["z"] = z;
    text << "G = (sum of " << d.z_lines.size() << " lines <p_n^-inf z_n>) + H, H of rank " << d.h.rank() << "\n";
    for (const auto& [n, a] : d.alpha) text << "  alpha_" << n << " = " << a << "\n";
  } else {
    auto cfg = Example3Config::defaults(static_cast<std::size_t>(o.n));
    auto ex = build_example3(cfg);
    Group h = ex.g;
    if (o.seed != 0) {
      std::mt19937_64 rng(o.seed);
      h = random_example3_summand(ex, rng).h;
    }
    auto d = example3_decompose_fully(cfg, h);
    ok = d.reassembles;
    Json blocks = Json::array();
    for (const auto& b : d.blocks) {
      Json jb;
      jb["rank"] = b.rank();
      Json dirs = Json::array();
      for (const auto& bl : b.base()) dirs.push_back(vec_str(bl.direction));
      jb["directions"] = dirs;
      Json rels = Json::array();
      for (const auto& r : b.relations()) {
        std::string w;
        for (const auto& x : r.w) w += (w.empty() ? "" : ", ") + x.get_str();
        rels.push_back("(" + w + ")/" + r.m.get_str());
      }
      jb["relations"] = rels;
      blocks.push_back(jb);
      text << "  block of rank " << b.rank() << ":";
      for (const auto& bl : b.base()) text << " " << vec_str(bl.direction);
      text << "\n";
    }
    j["rank"] = h.rank();
    j["blocks"] = blocks;
    text << "summand of rank " << h.rank() << " split into " << d.blocks.size() << " blocks\n";
  }
  j["verified"] = ok;
  text << "verified: " << (ok ? "yes" : "no") << "\n";
  write_or_print(o, out, o.json ? j.dump(2) + "\n" : text.str());
  return ok ? kExitTrue : kExitFalse;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    o.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.msg << "\n";
    return kExitUsage;
  }
  CLI::App app{"Exact computation with finite-rank torsion-free abelian groups", "tfab"};
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Emit the JSON report");

  auto file_cmd = [&](const std::string& name, const std::string& help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("file", o.file, "Presentation file (.tfab)")->required();
    c->add_flag("--json", o.json, "Emit the JSON report");
    return c;
  };
  auto* validate = file_cmd("validate", "Parse and validate a presentation");
  auto* member = file_cmd("member", "Membership of an element");
  member->add_option("--elt", o.elt, "Element expression")->required();
  auto* height = file_cmd("height", "p-height of an element");
  height->add_option("--elt", o.elt, "Element expression")->required();
  height->add_option("--prime", o.prime, "Prime")->required();
  auto* type = file_cmd("type", "Characteristic and type of an element");
  type->add_option("--elt", o.elt, "Element expression")->required();
  auto* pur = file_cmd("purify", "Pure closure of elements");
  pur->add_option("--elt", o.elts, "Element expressions")->required();
  auto* dec = file_cmd("decompose", "Main decomposition within a search bound");
  dec->add_option("--bound", o.bound, "Max-norm of candidate lines");
  dec->add_option("--seed", o.seed, "Candidate order seed (default TFAB_SEED)");
  auto* clip = file_cmd("clipped", "Search for a rank-1 summand");
  clip->add_option("--bound", o.bound, "Max-norm of candidate lines");
  auto* stein = file_cmd("stein", "Socle decomposition at a type");
  stein->add_option("--type", o.type, "Type as a prime list, e.g. 2,3")->required();
  auto* end = file_cmd("end", "Endomorphism ring and idempotents");
  end->add_option("--cap", o.cap, "Largest rank handled");
  end->add_option("--bound", o.bound, "Max-norm of idempotent lines");

  auto* ex = app.add_subcommand("example", "Build or verify the example truncations");
  ex->add_option("which", o.example, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  ex->add_option("action", o.action, "build, verify or split")->required()->check(CLI::IsMember({"build", "verify", "split"}));
  ex->add_option("--n", o.n, "Window size");
  ex->add_option("--bound", o.bound, "Search bound for clippedness checks");
  ex->add_option("--seed", o.seed, "Seed for random summands (default TFAB_SEED)");
  ex->add_option("--summands", o.summands, "Random summands checked in example 3");
  ex->add_option("--out", o.out_path, "Write the report to a file");
  ex->add_flag("--json", o.json, "Emit the JSON report");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitTrue : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (member->parsed()) return cmd_member(o, out);
    if (height->parsed()) return cmd_height(o, out);
    if (type->parsed()) return cmd_type(o, out);
    if (pur->parsed()) return cmd_purify(o, out);
    if (dec->parsed()) return cmd_decompose(o, out);
    if (clip->parsed()) return cmd_clipped(o, out);
    if (stein->parsed()) return cmd_stein(o, out);
    if (end->parsed()) return cmd_end(o, out);
    if (o.action == "build") return cmd_example_build(o, out);
    if (o.action == "verify") return cmd_example_verify(o, out);
    return cmd_example_split(o, out);
  } catch (const PositionedError& e) {
    err << o.file << ":" << e.pos().line << ":" << e.pos().col << ": error: " << e.message() << "\n";
    return kExitParse;
  } catch (const ExprError& e) {
    err << "--elt:" << e.pos.line << ":" << e.pos.col << ": error: " << e.msg << "\n";
    return kExitParse;
  } catch (const UsageError& e) {
    err << "error: " << e.msg << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NotMember ? kExitFalse : kExitUsage;
  }
}

}  // namespace tfab
