#pragma once

// The ttsynth command line: synth, regions, check, convert.
//
// Exit codes: 0 success, 1 check found a net not shown to be enabled,
// 2 usage/parse/validation error, 3 region enumeration truncated.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "ttsynth/convert.hpp"
#include "ttsynth/core.hpp"
#include "ttsynth/io.hpp"
#include "ttsynth/regions.hpp"
#include "ttsynth/semantics.hpp"
#include "ttsynth/synthesis.hpp"

namespace ttsynth::cli {

enum ExitCode : int { ok = 0, not_enabled = 1, failure = 2, truncated = 3 };

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::ParseError(detail::concat("cannot read ", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(detail::concat("cannot write ", path.string()));
  out << content;
  if (!out) throw Error(detail::concat("error while writing ", path.string()));
}

/// Labelled nets of one input file, dispatched on the extension:
/// .pnml (every net), .traces (one net per trace), .sg (state graph),
/// .run (partially ordered run).
inline std::vector<LabelledNet> load_nets(const std::filesystem::path& path, std::ostream& err) {
  const std::string ext = path.extension().string();
  const std::string text = read_file(path);
  std::vector<LabelledNet> nets;
  try {
    if (ext == ".pnml") {
      auto doc = io::parse_pnml_document(text);
      for (const auto& w : doc.warnings) err << path.string() << ": warning: " << w << '\n';
      nets = std::move(doc.nets);
    } else if (ext == ".traces") {
      for (const auto& trace : io::parse_traces(text)) nets.push_back(trace_to_labelled_net(trace));
    } else if (ext == ".sg") {
      nets.push_back(state_graph_to_labelled_net(io::parse_state_graph(text)));
    } else if (ext == ".run") {
      nets.push_back(run_to_labelled_net(io::parse_run(text)));
    } else {
      throw io::ParseError(detail::concat("unrecognised input extension '", ext, "'"));
    }
  } catch (const Error& e) {
    throw io::ParseError(detail::concat(path.string(), ": ", e.what()));
  }
  return nets;
}

inline Specification load_specification(const std::vector<std::string>& inputs, std::ostream& err) {
  Specification spec;
  for (const auto& input : inputs) {
    for (const auto& net : load_nets(input, err)) spec.add(net);
  }
  if (spec.empty()) throw io::ParseError("the specification is empty");
  return spec;
}

/// Marked net whose transitions are renamed to their (unique) labels.
inline MarkedPetriNet as_model(const LabelledNet& net) {
  std::map<std::string, std::string> by_label;
  MarkedPetriNet model;
  for (const auto& p : net.net.places()) model.net.add_place(p);
  for (const auto& t : net.net.transitions()) {
    const auto& label = net.label(t);
    if (!by_label.emplace(label, t).second) throw Error(detail::concat("model has two transitions labelled '", label, "'"));
    model.net.add_transition(label);
  }
  for (const auto& [arc, w] : net.net.arcs()) {
    if (net.net.has_transition(arc.first)) {
      model.net.add_arc(net.label(arc.first), arc.second, w);
    } else {
      model.net.add_arc(arc.first, net.label(arc.second), w);
    }
  }
  model.initial = net.initial;
  return model;
}

inline std::filesystem::path suffixed(const std::filesystem::path& out, std::size_t index) {
  auto name = out.stem().string() + "_" + std::to_string(index) + out.extension().string();
  return out.parent_path() / name;
}

struct SynthOptions {
  std::vector<std::string> inputs;
  std::int64_t k = 1;
  std::string mode = "synthesis";
  std::optional<std::size_t> max_regions;
  std::string out;
  std::string dot;
};

inline Mode parse_mode(const std::string& mode) {
  if (mode == "synthesis") return Mode::synthesis;
  if (mode == "discovery") return Mode::discovery;
  throw Error(detail::concat("unknown mode '", mode, "'"));
}

inline int cmd_synth(const SynthOptions& o, std::ostream& err) {
  if (o.inputs.empty()) throw io::ParseError("no input files");
  RegionProblem problem{load_specification(o.inputs, err), o.k, parse_mode(o.mode), o.max_regions};
  SynthesisResult result = synthesize(problem);
  const std::string pnml = io::write_pnml(result);
  const std::string dot = o.dot.empty() ? std::string() : io::export_dot(result.net);
  write_file(o.out, pnml);
  if (!o.dot.empty()) write_file(o.dot, dot);
  err << "regions: " << result.region_count << '\n' << "places: " << result.places.size() << '\n';
  if (result.truncated) {
    err << "warning: stopped after " << result.region_count << " regions (--max-regions)\n";
    return truncated;
  }
  return ok;
}

struct RegionsOptions {
  std::vector<std::string> inputs;
  std::int64_t k = 1;
  std::string mode = "synthesis";
  std::optional<std::size_t> max_regions;
  std::string format = "text";
};

inline int cmd_regions(const RegionsOptions& o, std::ostream& out, std::ostream& err) {
  if (o.inputs.empty()) throw io::ParseError("no input files");
  RegionProblem problem{load_specification(o.inputs, err), o.k, parse_mode(o.mode), o.max_regions};
  auto regions = enumerate_minimal_regions(problem);
  out << io::write_region_table(problem.spec.places(), regions.regions,
                                o.format == "json" ? io::TableFormat::json : io::TableFormat::text);
  err << "regions: " << regions.regions.size() << '\n';
  return regions.truncated ? truncated : ok;
}

struct CheckOptions {
  std::string model;
  std::vector<std::string> specs;
  std::optional<std::int64_t> bound;
};

inline int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  if (o.specs.empty()) throw io::ParseError("no specification files");
  if (o.bound && *o.bound < 0) throw Error("bound must be non-negative");
  MarkedPetriNet model = as_model(io::parse_pnml(read_file(o.model)));
  std::optional<Integer> bound;
  if (o.bound) bound = Integer(*o.bound);

  std::vector<std::pair<std::string, LabelledNet>> nets;
  for (const auto& file : o.specs) {
    auto loaded = load_nets(file, err);
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      nets.emplace_back(loaded.size() == 1 ? file : detail::concat(file, "#", i + 1), std::move(loaded[i]));
    }
  }
  // Label mismatches are usage errors; detect them before printing verdicts.
  for (const auto& [name, net] : nets) {
    for (const auto& e : net.net.transitions()) {
      if (!model.net.has_transition(net.label(e))) {
        throw Error(detail::concat(name, ": unknown label '", net.label(e), "'"));
      }
    }
  }

  int code = ok;
  for (const auto& [name, net] : nets) {
    auto verdict = is_enabled(model, net, bound);
    if (const auto* enabled = std::get_if<Enabled>(&verdict)) {
      out << name << ": enabled\n";
      for (const auto& [place, trail] : enabled->trails) out << "  " << place << ": trail " << trail << '\n';
    } else {
      const auto& missing = std::get<NotShownWithinBound>(verdict);
      out << name << ": not shown within bound at place " << missing.place << '\n';
      code = not_enabled;
    }
  }
  return code;
}

struct ConvertOptions {
  std::string input;
  std::string out;
};

inline int cmd_convert(const ConvertOptions& o, std::ostream& err) {
  auto nets = load_nets(o.input, err);
  if (nets.empty()) throw io::ParseError(detail::concat(o.input, ": nothing to convert"));
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    files.emplace_back(nets.size() == 1 ? std::filesystem::path(o.out) : suffixed(o.out, i + 1),
                       io::write_pnml(nets[i]));
  }
  for (const auto& [path, content] : files) write_file(path, content);
  err << "nets: " << nets.size() << '\n';
  return ok;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Petri net synthesis from labelled-net specifications via token-trail regions", "ttsynth"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "synthesise a Petri net from the inputs");
  synth_cmd->add_option("-k", synth.k, "bound on region values")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--mode", synth.mode, "synthesis or discovery")
      ->check(CLI::IsMember({"synthesis", "discovery"}));
  synth_cmd->add_option("--max-regions", synth.max_regions, "stop after this many regions");
  synth_cmd->add_option("-o,--out", synth.out, "output PNML file")->required();
  synth_cmd->add_option("--dot", synth.dot, "also write a DOT rendering");
  synth_cmd->add_option("inputs", synth.inputs, "input files (.pnml, .traces, .sg, .run)")->required();

  RegionsOptions regions;
  auto* regions_cmd = app.add_subcommand("regions", "print the minimal regions");
  regions_cmd->add_option("-k", regions.k, "bound on region values")->check(CLI::PositiveNumber);
  regions_cmd->add_option("--mode", regions.mode, "synthesis or discovery")
      ->check(CLI::IsMember({"synthesis", "discovery"}));
  regions_cmd->add_option("--max-regions", regions.max_regions, "stop after this many regions");
  regions_cmd->add_option("--format", regions.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  regions_cmd->add_option("inputs", regions.inputs, "input files")->required();

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "check that a model can simulate every specification net");
  check_cmd->add_option("--model", check.model, "model PNML file")->required();
  check_cmd->add_option("--bound", check.bound, "token trail search bound");
  check_cmd->add_option("specs", check.specs, "specification files")->required();

  ConvertOptions convert;
  auto* convert_cmd = app.add_subcommand("convert", "convert an input to PNML labelled nets");
  convert_cmd->add_option("input", convert.input, "input file")->required();
  convert_cmd->add_option("-o,--out", convert.out, "output PNML file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return failure;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, err);
    if (*regions_cmd) return cmd_regions(regions, out, err);
    if (*check_cmd) return cmd_check(check, out, err);
    if (*convert_cmd) return cmd_convert(convert, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}

}  // namespace ttsynth::cli
