// gausstat command-line front end; talks to the library through the C interface only.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gausstat/gausstat.h"

namespace {

enum Level { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

Level log_level() {
  const char* v = std::getenv("GAUSSTAT_LOG");
  if (!v) return Warn;
  const std::string s(v);
  static const std::map<std::string, Level> names{
      {"off", Off}, {"error", Error}, {"warn", Warn}, {"info", Info}, {"debug", Debug}};
  auto it = names.find(s);
  if (it != names.end()) return it->second;
  return std::isdigit(static_cast<unsigned char>(s[0])) ? static_cast<Level>(std::min(4, std::atoi(v))) : Warn;
}

void log(Level l, const std::string& msg) {
  static const Level cur = log_level();
  static const char* tags[] = {"", "error", "warn", "info", "debug"};
  if (l <= cur) std::cerr << "[gausstat] " << tags[l] << ": " << msg << "\n";
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "0.001" applies to every observable; "g2=1e-3,g3=2e-3" sets them individually.
std::string noise_json(const std::string& text) {
  if (text.empty()) return "{}";
  std::ostringstream os;
  os << "{";
  if (text.find('=') == std::string::npos) {
    const double s = std::stod(text);
    os << "\"nbar\":" << s << ",\"g1\":" << s << ",\"g2\":" << s << ",\"g3\":" << s << ",\"p0\":" << s;
  } else {
    std::stringstream in(text);
    std::string item;
    bool first = true;
    while (std::getline(in, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad --noise entry '" + item + "'");
      const std::string key = item.substr(0, eq);
      if (key != "nbar" && key != "g1" && key != "g2" && key != "g3" && key != "p0")
        throw std::runtime_error("unknown --noise observable '" + key + "'");
      os << (first ? "" : ",") << "\"" << key << "\":" << std::stod(item.substr(eq + 1));
      first = false;
    }
  }
  os << "}";
  return os.str();
}

struct Options {
  double tol = 1e-6;
  int cutoff = 0;
  unsigned long long seed = 0;
  std::string noise;
  std::string out;
};

class Context {
public:
  explicit Context(const Options& o) {
    std::ostringstream cfg;
    cfg.precision(17);
    cfg << "{\"tolerance\":" << o.tol << ",\"fock_cutoff\":" << o.cutoff << ",\"seed\":" << o.seed
        << ",\"noise\":" << noise_json(o.noise) << "}";
    status_ = gs_context_new(cfg.str().c_str(), &ctx_);
  }
  ~Context() { gs_context_free(ctx_); }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
  gs_context* get() const { return ctx_; }
  gs_status status() const { return status_; }

private:
  gs_context* ctx_ = nullptr;
  gs_status status_ = GS_OK;
};

int finish(gs_status st, char* text, const std::string& out_path) {
  if (st != GS_OK) {
    log(Error, gs_last_error());
    return gs_exit_code(st);
  }
  std::string s(text);
  gs_string_free(text);
  if (!s.empty() && s.back() != '\n') s += '\n';
  if (out_path.empty()) {
    std::cout << s;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      log(Error, "cannot write " + out_path);
      return 2;
    }
    f << s;
    log(Info, "wrote " + out_path);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-statistics observables, classification and reconstruction of Gaussian states"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand
  Options o;
  app.add_option("--tol", o.tol, "Relation / reconstruction tolerance")->check(CLI::PositiveNumber);
  app.add_option("--cutoff", o.cutoff, "Fock cutoff per mode for verify (0 = default)");
  app.add_option("--seed", o.seed, "Seed for simulated noise");
  app.add_option("--noise", o.noise, "Noise sigma: one value for all, or list like g2=1e-3,g3=1e-3");
  app.add_option("--out", o.out, "Output file (default stdout)");

  std::string in_file;
  auto* sim = app.add_subcommand("simulate", "Exact (optionally noisy) observables of a parameter file");
  sim->add_option("params", in_file, "GaussianParams JSON ('-' for stdin)")->required();
  auto* cls = app.add_subcommand("classify", "Test the Gaussian relations on measured data");
  cls->add_option("measurements", in_file, "Measurement JSON")->required();
  std::vector<std::string> rec_files;
  std::string sector = "auto";
  auto* rec = app.add_subcommand("reconstruct", "Recover Gaussian parameters from measured data");
  rec->add_option("inputs", rec_files, "Measurement JSON file(s); dst takes a scan or two ports")->required();
  rec->add_option("--sector", sector, "auto | nd | ns | dst")->check(CLI::IsMember({"auto", "nd", "ns", "dst"}));
  auto* ver = app.add_subcommand("verify", "Closed forms against the truncated-Fock oracle");
  ver->add_option("params", in_file, "GaussianParams JSON")->required();
  std::string relation = "nondisplaced";
  double from = 2.0, to = 6.0;
  int points = 41;
  auto* cur = app.add_subcommand("curves", "CSV points of the single-mode g2-g3 relations");
  cur->add_option("--relation", relation, "nondisplaced | nonsqueezed (aliases eq20 | eq21)")
      ->check(CLI::IsMember({"nondisplaced", "nonsqueezed", "eq20", "eq21"}));
  auto* cur_from = cur->add_option("--from", from, "First g2");
  auto* cur_to = cur->add_option("--to", to, "Last g2");
  cur->add_option("--points", points, "Number of points");
  auto* bkt = app.add_subcommand("bucket", "Mode-blind correlations, bounds and mode-count estimate");
  bkt->add_option("input", in_file, "GaussianParams JSON or {g2_b, g3_b}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cur->parsed()) {
      if (relation == "nonsqueezed" || relation == "eq21") {
        if (!cur_from->count()) from = 1.0;
        if (!cur_to->count()) to = 2.0;
      }
      char* csv = nullptr;
      const gs_status st = gs_curves(relation.c_str(), from, to, points, &csv);
      return finish(st, csv, o.out);
    }
    Context ctx(o);
    if (ctx.status() != GS_OK) {
      log(Error, gs_last_error());
      return gs_exit_code(ctx.status());
    }
    char* out = nullptr;
    gs_status st = GS_OK;
    if (rec->parsed()) {
      std::vector<std::string> docs;
      for (const auto& f : rec_files) docs.push_back(read_file(f));
      std::vector<const char*> ptrs;
      for (const auto& d : docs) ptrs.push_back(d.c_str());
      log(Debug, "reconstruct: " + std::to_string(docs.size()) + " input(s), sector " + sector);
      st = gs_reconstruct(ctx.get(), ptrs.data(), ptrs.size(), sector.c_str(), &out);
    } else {
      const std::string doc = read_file(in_file);
      log(Debug, "input " + in_file + " (" + std::to_string(doc.size()) + " bytes)");
      if (sim->parsed()) st = gs_simulate(ctx.get(), doc.c_str(), &out);
      else if (cls->parsed()) st = gs_classify(ctx.get(), doc.c_str(), &out);
      else if (ver->parsed()) st = gs_verify(ctx.get(), doc.c_str(), &out);
      else if (bkt->parsed()) st = gs_bucket(ctx.get(), doc.c_str(), &out);
    }
    return finish(st, out, o.out);
  } catch (const std::exception& e) {
    log(Error, e.what());
    return 2;
  }
}
