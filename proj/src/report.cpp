#include "dpa/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dpa/errors.hpp"

namespace dpa {

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

namespace {

void escape_json_string(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void emit(const nlohmann::ordered_json& node, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (node.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (node.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = node.begin(); it != node.end(); ++it, ++i) {
        out += inner;
        escape_json_string(it.key(), out);
        out += ": ";
        emit(it.value(), depth + 1, out);
        if (i + 1 < node.size()) out += ",";
        out += "\n";
      }
      out += indent + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (node.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : node) {
        if (v.is_structured()) {
          scalars = false;
          break;
        }
      }
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < node.size(); ++i) {
          emit(node[i], depth, out);
          if (i + 1 < node.size()) out += ", ";
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        out += inner;
        emit(node[i], depth + 1, out);
        if (i + 1 < node.size()) out += ",";
        out += "\n";
      }
      out += indent + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::string:
      escape_json_string(node.get<std::string>(), out);
      return;
    case nlohmann::ordered_json::value_t::boolean:
      out += node.get<bool>() ? "true" : "false";
      return;
    case nlohmann::ordered_json::value_t::number_integer:
      out += std::to_string(node.get<std::int64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_unsigned:
      out += std::to_string(node.get<std::uint64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_float:
      out += format_number(node.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string to_deterministic_json(const nlohmann::ordered_json& doc) {
  std::string out;
  emit(doc, 0, out);
  out += "\n";
  return out;
}

void CsvDoc::add_row(std::vector<std::string> cells) {
  rows_.push_back(std::move(cells));
}

std::string CsvDoc::str() const {
  std::string out;
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& cell = row[i];
      const bool quote = cell.find_first_of(",\"\n") != std::string::npos;
      if (quote) {
        out.push_back('"');
        for (char c : cell) {
          if (c == '"') out.push_back('"');
          out.push_back(c);
        }
        out.push_back('"');
      } else {
        out += cell;
      }
      if (i + 1 < row.size()) out.push_back(',');
    }
    out.push_back('\n');
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + path);
  out << content;
  if (!out) throw InputError("failed writing output file: " + path);
}

}  // namespace dpa
