#pragma once

// Shared by the pair and reference-vector writers. nlohmann's own dump uses
// shortest round-trip floats; the file formats fix 17 significant digits.

#include "eotbench/pair_io.hpp"

#include <json.hpp>

namespace eotbench::detail {

template <class Json>
void emit_json(const Json& value, std::string& out, int indent, int depth) {
  const bool pretty = indent > 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  auto is_scalar_array = [](const Json& v) {
    for (const auto& e : v) {
      if (e.is_structured()) return false;
    }
    return true;
  };
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        emit_json(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      // Rows of numbers stay on one line.
      const bool inline_row = is_scalar_array(value);
      out += '[';
      bool first = true;
      for (const auto& e : value) {
        if (!first) out += inline_row && pretty ? ", " : ",";
        first = false;
        if (!inline_row) newline(depth + 1);
        emit_json(e, out, indent, depth + 1);
      }
      if (!inline_row) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_real(value.template get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

template <class Json>
std::string emit(const Json& value, int indent) {
  std::string out;
  emit_json(value, out, indent, 0);
  if (indent > 0) out += '\n';
  return out;
}

}  // namespace eotbench::detail
