#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elan/elan.hpp"

#ifndef ELAN_VERSION
#define ELAN_VERSION "0.0.0"
#endif

namespace elan::cli {

namespace detail {

struct Loaded {
  microc::Program program;
  sdg::Sdg graph;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnalysisError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline microc::Program parse_files(const std::vector<std::string>& paths) {
  std::vector<microc::SourceFile> sources;
  for (const auto& p : paths) sources.push_back({p, read_file(p)});
  return microc::parse_programs(sources);
}

inline Loaded load(const std::vector<std::string>& paths, std::ostream& err) {
  Loaded l;
  l.program = parse_files(paths);
  l.graph = sdg::build_sdg(l.program);
  for (const auto& d : l.graph.diagnostics) err << d << '\n';
  return l;
}

inline std::optional<sdg::VertexId> start_vertex(const sdg::Sdg& g, const std::string& name) {
  if (name.empty()) return std::nullopt;
  auto v = g.function_entry(name);
  if (!v) throw AnalysisError("unknown start function '" + name + "'");
  return v;
}

inline std::vector<likelihood::ModelKind> models_of(const std::string& name) {
  if (name == "both") return {likelihood::ModelKind::Simple, likelihood::ModelKind::Heuristic};
  return {likelihood::parse_model(name)};
}

inline std::string fixed6(double v) { return ranking::format_likelihood(v); }

}  // namespace detail

/// Runs the command line; returns the process exit code (0 ok, 1 usage
/// error, 2 analysis error). Data goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Execution-likelihood analysis for MicroC programs", "elan"};
  app.set_version_flag("--version", ELAN_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for likelihood and profiling")
      ->check(CLI::Range(1u, 256u));

  std::vector<std::string> files;
  std::string line_file;
  std::string model_name = "simple";
  std::string start_name;
  bool json = false;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a program and print it back");
  parse_cmd->add_option("files", files, "MicroC source files")->required();
  parse_cmd->add_flag("--json", json, "Print a JSON summary instead of source");

  std::string dump_format = "json";
  auto* dump_cmd = app.add_subcommand("dump", "Print the dependence graph");
  dump_cmd->add_option("files", files, "MicroC source files")->required();
  dump_cmd->add_option("--format", dump_format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  dump_cmd->add_flag("--json", json, "Same as --format json");

  std::optional<int> line;
  std::optional<sdg::VertexId> vertex;
  auto* lik_cmd = app.add_subcommand("likelihood", "Execution likelihood of program locations");
  lik_cmd->add_option("files", files, "MicroC source files")->required();
  auto* line_opt = lik_cmd->add_option("--line", line, "Source line to query")->check(CLI::PositiveNumber);
  lik_cmd->add_option("--file", line_file, "File that --line refers to (default: first source)");
  lik_cmd->add_option("--vertex", vertex, "Vertex id to query")->excludes(line_opt);
  lik_cmd->add_option("--model", model_name, "simple or heuristic")
      ->check(CLI::IsMember({"simple", "heuristic"}));
  lik_cmd->add_option("--start", start_name, "Start function (default: entry function)");
  lik_cmd->add_flag("--json", json, "JSON output");

  std::string warnings_path;
  std::string warnings_format = "gcc";
  std::string rank_format = "tsv";
  std::string tiebreak = "location";
  auto* rank_cmd = app.add_subcommand("rank", "Order warnings by execution likelihood");
  rank_cmd->add_option("files", files, "MicroC source files")->required();
  rank_cmd->add_option("--warnings", warnings_path, "Warnings file")->required();
  rank_cmd->add_option("--warnings-format", warnings_format, "gcc or json")
      ->check(CLI::IsMember({"gcc", "json"}));
  rank_cmd->add_option("--format", rank_format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));
  rank_cmd->add_flag("--json", json, "Same as --format json");
  rank_cmd->add_option("--tiebreak", tiebreak, "location or severity")
      ->check(CLI::IsMember({"location", "severity"}));
  rank_cmd->add_option("--model", model_name, "simple or heuristic")
      ->check(CLI::IsMember({"simple", "heuristic"}));
  rank_cmd->add_option("--start", start_name, "Start function (default: entry function)");

  std::string inputs_path;
  std::uint64_t step_limit = profile::kDefaultStepLimit;
  auto* prof_cmd = app.add_subcommand("profile", "Run the program on inputs and measure coverage");
  prof_cmd->add_option("files", files, "MicroC source files")->required();
  prof_cmd->add_option("--inputs", inputs_path, "Inputs JSON")->required();
  prof_cmd->add_option("--step-limit", step_limit, "Per-run step limit")->check(CLI::PositiveNumber);
  prof_cmd->add_flag("--json", json, "JSON output");

  std::string report = "md";
  std::uint64_t seed = 42;
  std::uint32_t shuffle_trials = 0;
  std::string vertex_set = "all";
  auto* eval_cmd = app.add_subcommand("eval", "Compare predictions with measured coverage");
  eval_cmd->add_option("files", files, "MicroC source files")->required();
  eval_cmd->add_option("--inputs", inputs_path, "Inputs JSON")->required();
  eval_cmd->add_option("--model", model_name, "simple, heuristic or both")
      ->check(CLI::IsMember({"simple", "heuristic", "both"}));
  eval_cmd->add_option("--report", report, "md or json")->check(CLI::IsMember({"md", "json"}));
  eval_cmd->add_flag("--json", json, "Same as --report json");
  eval_cmd->add_option("--seed", seed, "Seed for shuffled baselines");
  eval_cmd->add_option("--shuffle-trials", shuffle_trials, "Monte-Carlo shuffles of the ranking");
  eval_cmd->add_option("--vertices", vertex_set, "control or all")->check(CLI::IsMember({"control", "all"}));
  eval_cmd->add_option("--start", start_name, "Start function (default: entry function)");
  eval_cmd->add_option("--step-limit", step_limit, "Per-run step limit")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*parse_cmd) {
      const auto prog = detail::parse_files(files);
      if (json) {
        nlohmann::ordered_json j;
        j["file"] = prog.file;
        j["node_count"] = prog.node_count;
        auto& fns = j["functions"] = nlohmann::ordered_json::array();
        for (const auto& fn : prog.functions) {
          nlohmann::ordered_json f;
          f["name"] = fn.name;
          f["return_type"] = microc::detail::type_name(fn.return_type);
          f["params"] = fn.params.size();
          f["line"] = fn.span.line_start;
          fns.push_back(std::move(f));
        }
        out << j.dump(2) << '\n';
      } else {
        out << microc::to_source(prog);
      }
      return 0;
    }

    const auto loaded = detail::load(files, err);
    const auto& g = loaded.graph;

    if (*dump_cmd) {
      if (dump_format == "dot" && !json) {
        sdg::write_dot(out, g);
      } else {
        out << sdg::to_json(g).dump(2) << '\n';
      }
      return 0;
    }

    if (*lik_cmd) {
      const auto model = likelihood::BranchModel::of(likelihood::parse_model(model_name));
      likelihood::LikelihoodEngine engine(g);
      const sdg::VertexId start = detail::start_vertex(g, start_name).value_or(engine.default_start());
      std::vector<sdg::VertexId> targets;
      if (line) {
        targets.push_back(sdg::vertex_at(g, line_file.empty() ? files.front() : line_file, *line));
      } else if (vertex) {
        sdg::check_vertex(g, *vertex);
        targets.push_back(*vertex);
      } else {
        for (sdg::VertexId v = 0; v < g.size(); ++v) targets.push_back(v);
      }
      const auto results = engine.batch(targets, start, model, jobs);
      auto as_json = [&](const likelihood::LikelihoodResult& r) {
        const auto& v = g.vertex(r.vertex);
        nlohmann::ordered_json j;
        j["vertex_id"] = r.vertex;
        j["file"] = v.span.file;
        j["line"] = v.span.line_start;
        j["kind"] = sdg::to_string(v.kind);
        j["text"] = v.text;
        j["likelihood"] = r.likelihood;
        j["model"] = likelihood::to_string(r.model);
        j["start"] = g.vertex(r.start).function;
        j["unreachable"] = r.unreachable;
        return j;
      };
      if (json) {
        if (results.size() == 1) {
          out << as_json(results.front()).dump() << '\n';
        } else {
          auto arr = nlohmann::ordered_json::array();
          for (const auto& r : results) arr.push_back(as_json(r));
          out << arr.dump(2) << '\n';
        }
      } else {
        for (const auto& r : results) {
          const auto& v = g.vertex(r.vertex);
          out << r.vertex << '\t' << v.span.line_start << '\t' << detail::fixed6(r.likelihood) << '\t'
              << v.text << '\n';
        }
      }
      return 0;
    }

    if (*rank_cmd) {
      std::ifstream win(warnings_path, std::ios::binary);
      if (!win) throw AnalysisError("cannot read '" + warnings_path + "'");
      const auto norm = ranking::normalize_warnings(win, ranking::parse_warning_format(warnings_format));
      for (const auto& d : norm.diagnostics) err << warnings_path << ": skipped " << d << '\n';
      if (norm.duplicates) err << warnings_path << ": " << norm.duplicates << " duplicate warning(s) collapsed\n";
      ranking::RankOptions opt;
      opt.model = likelihood::BranchModel::of(likelihood::parse_model(model_name));
      opt.start = detail::start_vertex(g, start_name);
      opt.jobs = jobs;
      opt.tiebreak = ranking::parse_tiebreak(tiebreak);
      const auto ranked = ranking::rank(g, norm.records, opt);
      if (json || rank_format == "json") {
        out << ranking::to_json(ranked).dump(2) << '\n';
      } else {
        ranking::write_tsv(out, ranked);
      }
      return 0;
    }

    std::ifstream iin(inputs_path, std::ios::binary);
    if (!iin) throw AnalysisError("cannot read '" + inputs_path + "'");
    const auto inputs = profile::read_inputs(iin);
    const auto prof = profile::profile(loaded.program, g, inputs, step_limit, jobs);
    for (const auto& d : prof.diagnostics) err << d << '\n';

    if (*prof_cmd) {
      if (json) {
        out << profile::to_json(prof).dump(2) << '\n';
      } else {
        for (sdg::VertexId v = 0; v < g.size(); ++v) {
          out << v << '\t' << g.vertex(v).span.line_start << '\t' << detail::fixed6(prof.fractions[v])
              << '\t' << g.vertex(v).text << '\n';
        }
      }
      return 0;
    }

    // eval
    const auto start = detail::start_vertex(g, start_name);
    const auto vertices = eval::select_vertices(g, eval::parse_vertex_set(vertex_set));
    eval::EvalReport rep;
    for (const auto& f : files) rep.program += (rep.program.empty() ? "" : " ") + f;
    rep.run_count = prof.run_count;
    for (auto kind : detail::models_of(model_name)) {
      rep.models.push_back(eval::evaluate(g, prof, vertices, likelihood::BranchModel::of(kind), start, jobs));
    }
    if (shuffle_trials > 0) rep.shuffle = eval::shuffle_baseline(vertices.size(), shuffle_trials, seed);
    if (json || report == "json") {
      out << eval::to_json(rep).dump(2) << '\n';
    } else {
      out << eval::to_markdown(rep);
    }
    return 0;
  } catch (const ParseError& e) {
    err << e.what() << '\n';
  } catch (const AnalysisError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace elan::cli
