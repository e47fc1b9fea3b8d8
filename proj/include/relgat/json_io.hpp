// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "relgat/errors.hpp"

namespace relgat {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Parses `text`; syntax errors are reported as "<origin>:<line>:<column>".
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1,
                                                     text.size());
    for (std::size_t k = 0; k < limit; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) {
      what = what.substr(pos);
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" +
                     std::to_string(column) + ": " + what);
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline json load_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

/// Rejects documents that declare an unsupported format_version.
inline void check_format_version(const json& doc, const std::string& origin) {
  if (!doc.is_object() || !doc.contains("format_version")) return;
  const auto& v = doc.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw InputError(origin + ": unsupported format_version " + v.dump());
  }
}

/// Pretty-printed with two-space indent and a trailing newline.
inline std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace relgat
