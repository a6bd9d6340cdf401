#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "giantwg/errors.hpp"
#include "giantwg/sweep.hpp"

namespace {

struct VerbOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
};

void add_common(CLI::App* sub, VerbOptions& opts) {
  sub->add_option("--config", opts.config_path, "flat key=value parameter file")
      ->required();
  sub->add_option("--out", opts.out_path, "output path (stdout when omitted)");
  sub->add_option("--format", opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

int run_verb(const std::string& verb, const VerbOptions& opts) {
  using giantwg::SweepTarget;
  giantwg::ConfigBundle bundle = giantwg::parse_config_file(opts.config_path);

  if (verb == "sweep") {
    if (!bundle.target_set)
      throw giantwg::ValidationError("target: required for the sweep verb");
  } else {
    SweepTarget expected = SweepTarget::SinglePhoton;
    bool two_verb = false;
    if (verb == "single") expected = SweepTarget::SinglePhoton;
    else if (verb == "two") { expected = SweepTarget::G2Map; two_verb = true; }
    else if (verb == "steady") expected = SweepTarget::SteadyCurve;
    else if (verb == "gap") expected = SweepTarget::GapCurve;
    else if (verb == "reflected") expected = SweepTarget::ReflectedCurve;
    if (!bundle.target_set) {
      bundle.target = expected;
    } else if (two_verb) {
      if (bundle.target != SweepTarget::G2Map &&
          bundle.target != SweepTarget::FluorescenceSlice)
        throw giantwg::ValidationError(
            "target: the two verb accepts g2_map or fluorescence_slice");
    } else if (bundle.target != expected) {
      throw giantwg::ValidationError("target: config says " +
                                     giantwg::to_string(bundle.target) +
                                     " but the verb expects " +
                                     giantwg::to_string(expected));
    }
  }
  if (bundle.target == SweepTarget::FluorescenceSlice) {
    bool has_p1 = false;
    for (const auto& a : bundle.axes) has_p1 = has_p1 || a.name == "p1";
    if (!has_p1)
      throw giantwg::ValidationError("axis: fluorescence_slice requires a p1 axis");
  }

  const auto start = std::chrono::steady_clock::now();
  const giantwg::SweepResult result = giantwg::run_sweep(bundle);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;

  const std::string text = (opts.format == "json")
                               ? giantwg::emit_json(bundle, result)
                               : giantwg::emit_csv(result);
  if (opts.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << opts.out_path << "\n";
      return 1;
    }
    out << text;
  }
  std::cerr << "elapsed: " << elapsed.count() << " s, " << result.rows.size()
            << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"giant-atom waveguide cavity calculator"};
  app.require_subcommand(1);
  const char* verbs[] = {"single", "two", "steady", "gap", "reflected", "sweep"};
  const char* descs[] = {"single-photon amplitudes over the axes",
                         "transmitted pair correlation or fluorescence slice",
                         "cavity steady-state observables",
                         "Liouvillian spectral gap",
                         "counterpropagating output density",
                         "target taken from the config file"};
  VerbOptions opts;
  for (int i = 0; i < 6; ++i)
    add_common(app.add_subcommand(verbs[i], descs[i]), opts);

  CLI11_PARSE(app, argc, argv);
  try {
    return run_verb(app.get_subcommands().front()->get_name(), opts);
  } catch (const giantwg::Error& e) {
    std::cerr << "error (" << e.code << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
