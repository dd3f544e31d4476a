#include "adlab/config.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "adlab/models.hpp"

namespace adlab::cli {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(ErrorKind::Parse, "config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.empty()) parse_fail(line, "empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    parse_fail(line, "malformed number '" + t + "'");
  return v;
}

long parse_integer(const std::string& text, int line) {
  const double v = parse_number(text, line);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    parse_fail(line, "expected an integer, got '" + trim(text) + "'");
  return n;
}

std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number(item, line));
  if (out.empty()) parse_fail(line, "empty list");
  return out;
}

struct RawEntry {
  std::string key;
  std::string value;
  int line;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<RawEntry> model_entries;

  enum class Section { None, Model, Run, Output };
  Section section = Section::None;

  std::stringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name == "model")
        section = Section::Model;
      else if (name == "run")
        section = Section::Run;
      else if (name == "output")
        section = Section::Output;
      else
        parse_fail(line, "unknown section '" + name + "'");
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      parse_fail(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(line, "missing key");

    switch (section) {
      case Section::None:
        parse_fail(line, "'" + key + "' appears before any [section]");
      case Section::Model:
        model_entries.push_back({key, value, line});
        break;
      case Section::Run:
        if (key == "T") {
          cfg.T_values = parse_list(value, line);
          for (size_t i = 1; i < cfg.T_values.size(); ++i)
            if (!(cfg.T_values[i] > cfg.T_values[i - 1]))
              parse_fail(line, "T list must be strictly increasing");
        } else if (key == "steps") {
          cfg.steps = parse_integer(value, line);
          if (cfg.steps < 0) parse_fail(line, "steps must be >= 0");
        } else if (key == "level") {
          cfg.level = static_cast<int>(parse_integer(value, line));
          if (cfg.level < 0) parse_fail(line, "level must be >= 0");
        } else if (key == "picture") {
          if (value != "a" && value != "b")
            parse_fail(line, "picture must be 'a' or 'b'");
          cfg.picture = value[0];
        } else if (key == "K") {
          cfg.grid_size = static_cast<int>(parse_integer(value, line));
          if (cfg.grid_size < 16) parse_fail(line, "K must be >= 16");
        } else if (key == "sample_count") {
          cfg.sample_count = static_cast<int>(parse_integer(value, line));
          if (cfg.sample_count < 2) parse_fail(line, "sample_count must be >= 2");
        } else if (key == "mode") {
          if (value != "self-consistent" && value != "frozen")
            parse_fail(line, "mode must be 'self-consistent' or 'frozen'");
          cfg.mode = value;
        } else {
          parse_fail(line, "unknown [run] key '" + key + "'");
        }
        break;
      case Section::Output:
        if (key == "path") {
          cfg.out_path = value;
        } else if (key == "format") {
          if (value != "csv" && value != "json")
            parse_fail(line, "format must be 'csv' or 'json'");
          cfg.format = value;
        } else {
          parse_fail(line, "unknown [output] key '" + key + "'");
        }
        break;
    }
  }

  // Resolve the model section against the catalog.
  int name_line = 0;
  for (const auto& e : model_entries)
    if (e.key == "name") {
      cfg.model_name = e.value;
      name_line = e.line;
    }
  if (cfg.model_name.empty()) {
    if (!model_entries.empty())
      parse_fail(model_entries.front().line,
                 "unknown [model] key '" + model_entries.front().key +
                     "' (model.name is not set)");
    fail(ErrorKind::Parse, "config: missing required key model.name");
  }

  const models::CatalogEntry* entry = nullptr;
  for (const auto& c : models::model_catalog())
    if (c.name == cfg.model_name) entry = &c;
  if (!entry)
    parse_fail(name_line, "unknown model '" + cfg.model_name + "'");

  for (const auto& e : model_entries) {
    if (e.key == "name") continue;
    if (entry->scalar_defaults.count(e.key)) {
      cfg.model_scalars[e.key] = parse_number(e.value, e.line);
    } else if (entry->list_defaults.count(e.key)) {
      cfg.model_lists[e.key] = parse_list(e.value, e.line);
    } else {
      parse_fail(e.line, "unknown [model] key '" + e.key + "' for model '" +
                             cfg.model_name + "'");
    }
  }
  return cfg;
}

}  // namespace adlab::cli
