#pragma once

// File formats: PNML place/transition nets, trace files, state-graph and run
// documents (JSON), DOT export and region tables.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include "json.hpp"

#include "ttsynth/convert.hpp"
#include "ttsynth/core.hpp"
#include "ttsynth/regions.hpp"
#include "ttsynth/semantics.hpp"
#include "ttsynth/synthesis.hpp"

namespace ttsynth::io {

inline constexpr const char* kPnmlNamespace = "http://www.pnml.org/version-2009/grammar/pnml";
inline constexpr const char* kPtNetType = "http://www.pnml.org/version-2009/grammar/ptnet";
inline constexpr const char* kToolName = "ttsynth";

class ParseError : public Error {
 public:
  using Error::Error;
};

namespace detail {

using ttsynth::detail::concat;
using Tree = boost::property_tree::ptree;

inline std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

inline std::string attribute(const Tree& node, const std::string& name) {
  return node.get<std::string>("<xmlattr>." + name, "");
}

/// Non-negative decimal integer; `context` prefixes error messages.
inline Integer parse_natural(const std::string& raw, const std::string& context) {
  std::string text = trim(raw);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ParseError(concat(context, ": expected a non-negative integer, got '", text, "'"));
  }
  return Integer(text);
}

inline std::optional<std::string> text_child(const Tree& node, const std::string& element) {
  auto child = node.get_child_optional(element);
  if (!child) return std::nullopt;
  return trim(child->get<std::string>("text", ""));
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct RawArc {
  std::string id, source, target;
  Integer weight;
};

struct NetCollector {
  std::vector<std::pair<std::string, Integer>> places;
  std::vector<std::pair<std::string, std::string>> transitions;
  std::vector<RawArc> arcs;
  std::optional<std::string> final_place;
  std::vector<std::string>* warnings;

  void warn(std::string message) {
    if (warnings) warnings->push_back(std::move(message));
  }

  void tool_specific(const Tree& node, const std::string& context, bool net_level) {
    if (attribute(node, "tool") != kToolName) {
      warn(concat(context, ": ignoring toolspecific element of tool '", attribute(node, "tool"), "'"));
      return;
    }
    if (net_level) {
      if (auto final = node.get_optional<std::string>("finalPlace")) final_place = trim(*final);
    }
  }

  void object_children(const Tree& node, const std::string& context, const std::set<std::string>& known) {
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>" || tag == "<xmlcomment>" || known.count(tag) != 0 || tag == "graphics") continue;
      if (tag == "toolspecific") {
        tool_specific(child, context, false);
        continue;
      }
      warn(concat(context, ": ignoring unknown element <", tag, ">"));
    }
  }

  void collect(const Tree& container, const std::string& context) {
    for (const auto& [tag, node] : container) {
      if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "name" || tag == "graphics") continue;
      if (tag == "page") {
        collect(node, concat(context, " page '", attribute(node, "id"), "'"));
      } else if (tag == "place") {
        const std::string id = attribute(node, "id");
        const std::string where = concat("place '", id, "'");
        if (id.empty()) throw ParseError(concat(context, ": place without id"));
        Integer tokens = 0;
        if (auto text = text_child(node, "initialMarking")) tokens = parse_natural(*text, where + " initialMarking");
        object_children(node, where, {"name", "initialMarking"});
        places.emplace_back(id, tokens);
      } else if (tag == "transition") {
        const std::string id = attribute(node, "id");
        if (id.empty()) throw ParseError(concat(context, ": transition without id"));
        auto name = text_child(node, "name");
        object_children(node, concat("transition '", id, "'"), {"name"});
        transitions.emplace_back(id, name && !name->empty() ? *name : id);
      } else if (tag == "arc") {
        RawArc arc{attribute(node, "id"), attribute(node, "source"), attribute(node, "target"), 1};
        const std::string where = concat("arc '", arc.id, "'");
        if (arc.source.empty() || arc.target.empty()) throw ParseError(where + ": missing source or target");
        if (auto text = text_child(node, "inscription")) arc.weight = parse_natural(*text, where + " inscription");
        if (arc.weight == 0) throw ParseError(where + ": weight must be positive");
        object_children(node, where, {"inscription"});
        arcs.push_back(std::move(arc));
      } else if (tag == "toolspecific") {
        tool_specific(node, context, true);
      } else {
        throw ParseError(concat(context, ": unsupported element <", tag, ">"));
      }
    }
  }

  LabelledNet build(const std::string& context) const {
    LabelledNet net;
    try {
      for (const auto& [id, tokens] : places) {
        net.net.add_place(id);
        net.initial.set(id, tokens);
      }
      for (const auto& [id, label] : transitions) {
        net.net.add_transition(id);
        net.labels[id] = label;
      }
      for (const auto& arc : arcs) {
        if (!net.net.has_node(arc.source) || !net.net.has_node(arc.target)) {
          throw ParseError(concat("arc '", arc.id, "': dangling reference ", arc.source, " -> ", arc.target));
        }
        net.net.add_arc(arc.source, arc.target, arc.weight);
      }
      net.final_place = final_place;
      net.validate();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(concat(context, ": ", e.what()));
    }
    return net;
  }
};

}  // namespace detail

struct PnmlDocument {
  std::vector<LabelledNet> nets;
  std::vector<std::string> warnings;
};

/// Parses every <net> of a PNML document. Pages are flattened; graphics and
/// names of places/arcs are ignored; foreign toolspecific data and unknown
/// decorations are reported as warnings; unknown structural elements are
/// errors.
inline PnmlDocument parse_pnml_document(std::string_view text) {
  detail::Tree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(detail::concat("malformed XML at line ", e.line(), ": ", e.message()));
  }
  auto root = tree.get_child_optional("pnml");
  if (!root) throw ParseError("document has no <pnml> root element");

  PnmlDocument doc;
  for (const auto& [tag, node] : *root) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag != "net") {
      doc.warnings.push_back(detail::concat("ignoring element <", tag, "> under <pnml>"));
      continue;
    }
    const std::string id = detail::attribute(node, "id");
    const std::string context = detail::concat("net '", id, "'");
    const std::string type = detail::attribute(node, "type");
    if (!type.empty() && type != kPtNetType) {
      doc.warnings.push_back(detail::concat(context, ": net type '", type, "' read as place/transition net"));
    }
    detail::NetCollector collector;
    collector.warnings = &doc.warnings;
    collector.collect(node, context);
    doc.nets.push_back(collector.build(context));
  }
  if (doc.nets.empty()) throw ParseError("document contains no <net>");
  return doc;
}

/// Parses a document holding exactly one net.
inline LabelledNet parse_pnml(std::string_view text, std::vector<std::string>* warnings = nullptr) {
  PnmlDocument doc = parse_pnml_document(text);
  if (doc.nets.size() != 1) throw ParseError(detail::concat("expected one net, found ", doc.nets.size()));
  if (warnings) warnings->insert(warnings->end(), doc.warnings.begin(), doc.warnings.end());
  return std::move(doc.nets.front());
}

namespace detail {

inline void write_arcs(std::ostream& out, const PetriNet& net) {
  std::size_t n = 0;
  auto arc = [&](const std::string& from, const std::string& to, const Integer& w) {
    out << "      <arc id=\"a" << ++n << "\" source=\"" << xml_escape(from) << "\" target=\"" << xml_escape(to)
        << "\">";
    if (w != 1) out << "\n        <inscription><text>" << w << "</text></inscription>\n      ";
    out << "</arc>\n";
  };
  for (const auto& t : net.transitions()) {
    for (const auto& p : net.places()) {
      if (auto w = net.weight(p, t); w > 0) arc(p, t, w);
    }
    for (const auto& p : net.places()) {
      if (auto w = net.weight(t, p); w > 0) arc(t, p, w);
    }
  }
}

template <typename PlaceExtra>
void write_net(std::ostream& out, const PetriNet& net, const Marking& initial,
               const std::map<std::string, std::string>& labels, const std::optional<std::string>& final_place,
               PlaceExtra&& place_extra) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<pnml xmlns=\"" << kPnmlNamespace << "\">\n";
  out << "  <net id=\"net1\" type=\"" << kPtNetType << "\">\n";
  out << "    <page id=\"page1\">\n";
  for (const auto& p : net.places()) {
    out << "      <place id=\"" << xml_escape(p) << "\">\n";
    out << "        <name><text>" << xml_escape(p) << "</text></name>\n";
    if (auto tokens = initial.count(p); tokens > 0) {
      out << "        <initialMarking><text>" << tokens << "</text></initialMarking>\n";
    }
    place_extra(out, p);
    out << "      </place>\n";
  }
  for (const auto& t : net.transitions()) {
    out << "      <transition id=\"" << xml_escape(t) << "\">\n";
    out << "        <name><text>" << xml_escape(labels.at(t)) << "</text></name>\n";
    out << "      </transition>\n";
  }
  write_arcs(out, net);
  out << "    </page>\n";
  if (final_place) {
    out << "    <toolspecific tool=\"" << kToolName << "\" version=\"1.0\"><finalPlace>" << xml_escape(*final_place)
        << "</finalPlace></toolspecific>\n";
  }
  out << "  </net>\n</pnml>\n";
}

}  // namespace detail

inline std::string write_pnml(const LabelledNet& net) {
  std::ostringstream out;
  detail::write_net(out, net.net, net.initial, net.labels, net.final_place, [](std::ostream&, const std::string&) {});
  return out.str();
}

/// Synthesised net; each place carries its source region in a toolspecific
/// block that other tools may ignore.
inline std::string write_pnml(const SynthesisResult& result) {
  std::map<std::string, std::string> labels;
  for (const auto& t : result.net.net.transitions()) labels[t] = t;
  std::map<std::string, const PlaceDefinition*> definition;
  for (std::size_t i = 0; i < result.places.size(); ++i) {
    definition[result.net.net.places()[i]] = &result.places[i];
  }
  std::ostringstream out;
  detail::write_net(out, result.net.net, result.net.initial, labels, std::nullopt,
                    [&](std::ostream& o, const std::string& place) {
                      const Region& r = definition.at(place)->source_region;
                      o << "        <toolspecific tool=\"" << kToolName << "\" version=\"1.0\">\n";
                      o << "          <region k=\"" << r.k << "\">\n";
                      for (const auto& [c, tokens] : r.marking) {
                        o << "            <token place=\"" << detail::xml_escape(c) << "\">" << tokens << "</token>\n";
                      }
                      o << "          </region>\n";
                      o << "        </toolspecific>\n";
                    });
  return out.str();
}

// ---------------------------------------------------------------------------
// Traces, state graphs, runs

/// One trace per line, whitespace-separated labels; blank lines and lines
/// starting with '#' are skipped.
inline std::vector<Trace> parse_traces(std::string_view text) {
  std::vector<Trace> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string content = detail::trim(line);
    if (content.empty() || content.front() == '#') continue;
    std::istringstream words(content);
    Trace trace;
    for (std::string label; words >> label;) trace.push_back(label);
    out.push_back(std::move(trace));
  }
  return out;
}

namespace detail {

inline nlohmann::json parse_json(std::string_view text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(concat("malformed ", what, ": ", e.what()));
  }
}

inline std::string string_field(const nlohmann::json& j, const char* field, const std::string& context) {
  if (!j.is_object() || !j.contains(field) || !j.at(field).is_string()) {
    throw ParseError(concat(context, ": missing string field '", field, "'"));
  }
  return j.at(field).get<std::string>();
}

}  // namespace detail

/// JSON document {"initial": id, "arcs": [{"from", "label", "to"} | [from, label, to]],
/// "states": [...] (optional)}. States are the initial state, the listed
/// states and the arc endpoints, in first-appearance order.
inline StateGraph parse_state_graph(std::string_view text) {
  auto j = detail::parse_json(text, "state graph");
  StateGraph sg;
  sg.initial = detail::string_field(j, "initial", "state graph");
  std::set<std::string> seen;
  auto note = [&](const std::string& s) {
    if (seen.insert(s).second) sg.states.push_back(s);
  };
  note(sg.initial);
  if (j.contains("states")) {
    for (const auto& s : j.at("states")) {
      if (!s.is_string()) throw ParseError("state graph: states must be strings");
      note(s.get<std::string>());
    }
  }
  if (j.contains("arcs")) {
    std::size_t index = 0;
    for (const auto& a : j.at("arcs")) {
      const std::string context = detail::concat("state graph arc ", index++);
      StateArc arc;
      if (a.is_array()) {
        if (a.size() != 3 || !a[0].is_string() || !a[1].is_string() || !a[2].is_string()) {
          throw ParseError(context + ": expected [from, label, to]");
        }
        arc = {a[0].get<std::string>(), a[1].get<std::string>(), a[2].get<std::string>()};
      } else {
        arc = {detail::string_field(a, "from", context), detail::string_field(a, "label", context),
               detail::string_field(a, "to", context)};
      }
      note(arc.from);
      note(arc.to);
      sg.arcs.push_back(std::move(arc));
    }
  }
  try {
    sg.validate();
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return sg;
}

/// JSON document {"events": [{"id", "label"}], "order": [[v, w], ...]}.
inline Run parse_run(std::string_view text) {
  auto j = detail::parse_json(text, "run");
  Run run;
  if (!j.is_object() || !j.contains("events") || !j.at("events").is_array()) {
    throw ParseError("run: missing array 'events'");
  }
  for (const auto& e : j.at("events")) {
    const std::string id = detail::string_field(e, "id", "run event");
    if (run.has_event(id)) throw ParseError(detail::concat("run: duplicate event '", id, "'"));
    run.events.push_back(id);
    run.labels[id] = detail::string_field(e, "label", "run event '" + id + "'");
  }
  if (j.contains("order")) {
    for (const auto& pair : j.at("order")) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw ParseError("run: order entries must be [from, to]");
      }
      std::string a = pair[0].get<std::string>(), b = pair[1].get<std::string>();
      if (!run.has_event(a) || !run.has_event(b)) throw ParseError("run: order relates unknown events");
      run.order.emplace_back(std::move(a), std::move(b));
    }
  }
  if (!check_run_wellformed(run)) throw ParseError("not a partial order");
  return run;
}

// ---------------------------------------------------------------------------
// DOT

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string export_dot(const PetriNet& net, const Marking& initial,
                              const std::map<std::string, std::string>& labels) {
  std::ostringstream out;
  out << "digraph net {\n  rankdir=LR;\n";
  for (const auto& p : net.places()) {
    auto tokens = initial.count(p);
    out << "  " << dot_quote(p) << " [shape=circle, xlabel=" << dot_quote(p)
        << ", label=" << dot_quote(tokens > 0 ? tokens.str() : "") << "];\n";
  }
  for (const auto& t : net.transitions()) {
    out << "  " << dot_quote(t) << " [shape=box, label=" << dot_quote(labels.at(t)) << "];\n";
  }
  auto edge = [&](const std::string& from, const std::string& to, const Integer& w) {
    out << "  " << dot_quote(from) << " -> " << dot_quote(to);
    if (w > 1) out << " [label=" << dot_quote(w.str()) << "]";
    out << ";\n";
  };
  for (const auto& t : net.transitions()) {
    for (const auto& p : net.places()) {
      if (auto w = net.weight(p, t); w > 0) edge(p, t, w);
    }
    for (const auto& p : net.places()) {
      if (auto w = net.weight(t, p); w > 0) edge(t, p, w);
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace detail

inline std::string export_dot(const LabelledNet& net) { return detail::export_dot(net.net, net.initial, net.labels); }

inline std::string export_dot(const MarkedPetriNet& net) {
  std::map<std::string, std::string> labels;
  for (const auto& t : net.net.transitions()) labels[t] = t;
  return detail::export_dot(net.net, net.initial, labels);
}

// ---------------------------------------------------------------------------
// Region tables

enum class TableFormat { text, json };

/// One row per region, one column per place in the given order.
inline std::string write_region_table(const std::vector<std::string>& places, const std::vector<Region>& regions,
                                      TableFormat format) {
  if (format == TableFormat::json) {
    nlohmann::ordered_json doc;
    doc["places"] = places;
    doc["regions"] = nlohmann::ordered_json::array();
    for (const auto& r : regions) {
      nlohmann::ordered_json row = nlohmann::ordered_json::object();
      for (const auto& c : places) {
        Integer tokens = r.marking.count(c);
        if (tokens.is_zero() || tokens < INT64_MAX) {
          row[c] = tokens.convert_to<std::int64_t>();
        } else {
          row[c] = tokens.str();
        }
      }
      doc["regions"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }
  std::vector<std::size_t> width;
  for (const auto& c : places) {
    std::size_t w = c.size();
    for (const auto& r : regions) w = std::max(w, r.marking.count(c).str().size());
    width.push_back(w);
  }
  std::ostringstream out;
  auto cell = [&](std::size_t i, const std::string& s) {
    if (i > 0) out << "  ";
    out << std::string(width[i] - s.size(), ' ') << s;
  };
  for (std::size_t i = 0; i < places.size(); ++i) cell(i, places[i]);
  out << '\n';
  for (const auto& r : regions) {
    for (std::size_t i = 0; i < places.size(); ++i) cell(i, r.marking.count(places[i]).str());
    out << '\n';
  }
  return out.str();
}

}  // namespace ttsynth::io
