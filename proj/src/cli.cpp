#include "sbpm/cli.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "sbpm/api.hpp"

namespace sbpm {

namespace {

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("UnreadableInput", "cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  if (!out)
    throw Error("UnwritableOutput", "cannot write '" + path + "'", path);
}

std::map<std::string, int>
parse_multiplicities(const std::vector<std::string>& items) {
  std::map<std::string, int> out;
  for (auto& item : items) {
    auto eq = item.find('=');
    int k = 0;
    auto* first = item.data() + (eq == std::string::npos ? 0 : eq + 1);
    auto* last = item.data() + item.size();
    auto [p, ec] = std::from_chars(first, last, k);
    if (eq == std::string::npos || eq == 0 || ec != std::errc{} || p != last)
      throw Error("BadArgument", "expected SUBJECT=COUNT, got '" + item + "'",
                  item);
    out[item.substr(0, eq)] = k;
  }
  return out;
}

int exit_code_for(const Error& e) {
  if (e.code() == "SemanticViolation" || e.code() == "ModelInvalid")
    return exit_violations;
  return exit_malformed;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;

  void print(const api::json& j) {
    out << j.dump(2) << "\n";
  }
};

int cmd_validate(Context& cx, const std::string& file,
                 const std::string& notation_file) {
  auto doc = from_xml(read_input(file));
  auto notation = notation_file.empty()
                    ? sbpm_default_notation()
                    : notation_from_xml(read_input(notation_file));
  auto violations = api::validate(doc, notation);
  if (cx.json)
    cx.print(api::validation_json(violations));
  else
    for (auto& v : violations)
      cx.out << to_string(v) << "\n";
  return has_errors(violations) ? exit_violations : exit_ok;
}

int cmd_analyze(Context& cx, const std::string& file) {
  auto n = notation_from_xml(read_input(file));
  auto report = ontological_analysis(n);
  auto lints = design_lints(n);
  if (cx.json) {
    cx.print(api::to_json(report, lints));
  } else {
    auto list = [&](const char* what, const std::vector<std::string>& xs) {
      for (auto& x : xs)
        cx.out << what << " " << x << "\n";
    };
    list("deficit", report.deficits);
    list("redundancy", report.redundancies);
    list("overload", report.overloads);
    list("excess", report.excesses);
    for (auto& l : lints)
      cx.out << "lint " << l.code << " " << join(l.kinds, ",") << " "
             << l.detail << "\n";
  }
  return report.empty() ? exit_ok : exit_violations;
}

int cmd_run(Context& cx, const std::string& file, const api::json& settings,
            const std::string& trace_file, std::string trace_format) {
  auto doc = from_xml(read_input(file));
  auto inst = ProcessInstance::instantiate(doc.model,
                                           api::read_scheduler(settings));
  auto status = inst.run();
  if (!trace_file.empty()) {
    if (trace_format.empty()) {
      auto ends = [&](std::string_view ext) {
        return trace_file.size() >= ext.size()
               && trace_file.compare(trace_file.size() - ext.size(),
                                     ext.size(), ext)
                    == 0;
      };
      trace_format = ends(".xml") ? "xml" : ends(".json") ? "json" : "lines";
    }
    TraceDocument td{inst.trace(), inst.status(), inst.clock()};
    if (trace_format == "xml")
      write_output(trace_file, trace_to_xml(td));
    else if (trace_format == "json")
      write_output(trace_file, xml_to_json(trace_to_xml(td)));
    else
      write_output(trace_file, to_lines(inst.trace()));
  }
  if (cx.json)
    cx.print(api::run_json(inst));
  else if (trace_file.empty())
    cx.out << to_lines(inst.trace());
  cx.err << "status " << to_string(status) << " clock " << inst.clock()
         << " steps " << inst.steps() << "\n";
  switch (status) {
    case InstanceStatus::Completed:
      return exit_ok;
    case InstanceStatus::Deadlocked:
      return exit_deadlock;
    default:
      return exit_limit;
  }
}

int cmd_explore(Context& cx, const std::string& file, const api::json& settings) {
  auto doc = from_xml(read_input(file));
  ExplorationBounds bounds;
  ExplorationOptions options;
  api::read_exploration(settings, bounds, options);
  auto r = state_space(doc.model, bounds, options);
  if (cx.json) {
    cx.print(api::to_json(r));
  } else {
    cx.out << "states " << r.states << " transitions " << r.transitions
           << " complete " << (r.complete ? "yes" : "no") << "\n";
    cx.out << "terminal";
    for (auto s : r.terminal_statuses)
      cx.out << " " << to_string(s);
    cx.out << "\n";
    for (auto& [s, ok] : r.end_reachable)
      cx.out << "end-reachable " << s << " " << (ok ? "yes" : "no") << "\n";
    for (auto& d : r.deadlocks)
      cx.out << describe(d);
  }
  if (!r.deadlocks.empty())
    return exit_deadlock;
  return r.complete ? exit_ok : exit_limit;
}

int cmd_export(Context& cx, const std::string& file, const std::string& format) {
  auto text = read_input(file);
  if (format == "json") {
    cx.out << xml_to_json(text);
    return exit_ok;
  }
  auto kind = document_kind(text);
  if (format == "dot") {
    if (kind != "Model")
      throw Error("BadArgument", "dot export needs a Model document", kind);
    cx.out << export_dot(from_xml(text).model);
  } else if (kind == "Model") {
    auto doc = from_xml(text);
    cx.out << to_xml(doc.model, doc.layout);
  } else if (kind == "Notation") {
    cx.out << notation_to_xml(notation_from_xml(text));
  } else {
    cx.out << trace_to_xml(trace_from_xml(text));
  }
  return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Subject-oriented process models: validate, run, explore, "
               "convert.",
               "sbpm"};
  app.require_subcommand(1);
  Context cx{out, err};

  std::string file, notation_file, trace_file, trace_format, policy, format;
  std::uint64_t seed = 0, max_steps = 10000;
  std::size_t max_states = 100000, max_mailbox = 4, max_depth = 10000;
  std::vector<std::string> multiplicities;
  bool no_symmetry = false;

  auto* validate = app.add_subcommand("validate", "Check a model document");
  validate->add_option("file", file)->required();
  validate->add_option("--notation", notation_file,
                       "Notation document for layout conformance");
  validate->add_flag("--json", cx.json);

  auto* analyze = app.add_subcommand("analyze-notation",
                                     "Ontological analysis and design lints");
  analyze->add_option("file", file)->required();
  analyze->add_flag("--json", cx.json);

  auto* defaults = app.add_subcommand("default-notation",
                                      "Print the built-in S-BPM notation");

  auto* run = app.add_subcommand("run", "Execute a model");
  run->add_option("file", file)->required();
  run->add_option("--seed", seed);
  run->add_option("--max-steps", max_steps);
  run->add_option("--policy", policy, "round-robin or seeded-random")
    ->check(CLI::IsMember({"round-robin", "seeded-random"}));
  run->add_option("--multiplicity", multiplicities, "SUBJECT=COUNT");
  run->add_option("--trace", trace_file, "Write the trace to this file");
  run->add_option("--trace-format", trace_format)
    ->check(CLI::IsMember({"lines", "xml", "json"}));
  run->add_flag("--json", cx.json);

  auto* explore = app.add_subcommand("explore", "Bounded state-space search");
  explore->add_option("file", file)->required();
  explore->add_option("--max-states", max_states);
  explore->add_option("--max-mailbox", max_mailbox);
  explore->add_option("--max-depth", max_depth);
  explore->add_option("--multiplicity", multiplicities, "SUBJECT=COUNT");
  explore->add_flag("--no-symmetry", no_symmetry);
  explore->add_flag("--json", cx.json);

  auto* exporter = app.add_subcommand("export", "Convert a document");
  exporter->add_option("file", file)->required();
  exporter->add_option("--format", format)
    ->required()
    ->check(CLI::IsMember({"dot", "json", "xml"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_malformed;
  }

  try {
    if (*validate)
      return cmd_validate(cx, file, notation_file);
    if (*analyze)
      return cmd_analyze(cx, file);
    if (*defaults) {
      out << notation_to_xml(sbpm_default_notation());
      return exit_ok;
    }
    api::json settings = {{"multiplicities", api::json::object()}};
    for (auto& [s, k] : parse_multiplicities(multiplicities))
      settings["multiplicities"][s] = k;
    if (*run) {
      settings["policy"] = policy.empty() ? "seeded-random" : policy;
      settings["seed"] = seed;
      settings["max_steps"] = max_steps;
      return cmd_run(cx, file, settings, trace_file, trace_format);
    }
    if (*explore) {
      settings["max_states"] = max_states;
      settings["max_mailbox"] = max_mailbox;
      settings["max_depth"] = max_depth;
      settings["symmetry_reduction"] = !no_symmetry;
      return cmd_explore(cx, file, settings);
    }
    return cmd_export(cx, file, format);
  } catch (const SemanticViolationError& e) {
    err << e.code() << ": " << e.what() << "\n";
    if (cx.json)
      cx.print(api::validation_json(e.violations()));
    else
      for (auto& v : e.violations())
        out << to_string(v) << "\n";
    return exit_violations;
  } catch (const Error& e) {
    err << e.code() << ": " << e.what();
    if (!e.details().empty())
      err << " (" << e.details() << ")";
    err << "\n";
    return exit_code_for(e);
  }
}

} // namespace sbpm
