// Copyright 2026 The NashStoch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NASHSTOCH_IO_HPP_
#define NASHSTOCH_IO_HPP_

// Game files: the payoff variant of Gambit's .nfg format and a canonical JSON
// tensor format (.game.json).
//
// JSON schema:
//   {
//     "action_counts": [m_1, ..., m_n],
//     "labels": {"actions": [[...], ...], "players": [...], "title": "..."},
//     "normalized": true | false,
//     "players": n,
//     "tensors": [T_1, ..., T_n]   // T_k nested n deep, axis 1 outermost
//   }

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nashstoch/errors.hpp"
#include "nashstoch/game.hpp"

namespace nashstoch {

enum class GameFormat { kNfg, kJson };

struct GameDocument {
  GameFormat format;
  NormalFormGame raw;   // payoffs exactly as read
  NormalFormGame game;  // normalized unless the caller opted out
  std::string title;
  std::string comment;
};

namespace internal {

struct NfgToken {
  enum Kind { kWord, kString, kOpen, kClose, kEnd } kind;
  std::string text;
  int line;
  int column;
};

class NfgLexer {
 public:
  explicit NfgLexer(std::string_view text) : text_(text) {}

  NfgToken Next() {
    SkipSpace();
    const int line = line_, column = column_;
    if (pos_ >= text_.size()) return {NfgToken::kEnd, "", line, column};
    const char c = text_[pos_];
    if (c == '{') {
      Advance();
      return {NfgToken::kOpen, "{", line, column};
    }
    if (c == '}') {
      Advance();
      return {NfgToken::kClose, "}", line, column};
    }
    if (c == '"') {
      Advance();
      std::string s;
      while (true) {
        if (pos_ >= text_.size())
          throw ParseError("unterminated string", line, column);
        char d = text_[pos_];
        Advance();
        if (d == '\\' && pos_ < text_.size()) {
          s.push_back(text_[pos_]);
          Advance();
        } else if (d == '"') {
          break;
        } else {
          s.push_back(d);
        }
      }
      return {NfgToken::kString, s, line, column};
    }
    std::string w;
    while (pos_ < text_.size() && !IsSpace(text_[pos_]) && text_[pos_] != '{' &&
           text_[pos_] != '}' && text_[pos_] != '"') {
      w.push_back(text_[pos_]);
      Advance();
    }
    return {NfgToken::kWord, w, line, column};
  }

 private:
  static bool IsSpace(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',';
  }
  void Advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }
  void SkipSpace() {
    while (pos_ < text_.size() && IsSpace(text_[pos_])) Advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

inline double ParseNumber(const NfgToken& t) {
  auto parse_double = [&](std::string_view s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
      throw ParseError("expected a number, found '" + t.text + "'", t.line,
                       t.column);
    return v;
  };
  std::string_view s = t.text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_double(s);
  const double num = parse_double(s.substr(0, slash));
  const double den = parse_double(s.substr(slash + 1));
  if (den == 0.0)
    throw ParseError("zero denominator in '" + t.text + "'", t.line, t.column);
  return num / den;
}

inline std::string QuoteNfg(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string FormatDouble17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace internal

inline GameDocument ParseNfg(std::string_view text) {
  using internal::NfgToken;
  internal::NfgLexer lex(text);
  auto expect_word = [&](const std::string& w) {
    NfgToken t = lex.Next();
    if (t.kind != NfgToken::kWord || t.text != w)
      throw ParseError("expected '" + w + "', found '" + t.text + "'", t.line,
                       t.column);
  };
  auto expect = [&](NfgToken::Kind kind, const char* what) {
    NfgToken t = lex.Next();
    if (t.kind != kind)
      throw ParseError(std::string("expected ") + what + ", found '" + t.text +
                           "'",
                       t.line, t.column);
    return t;
  };

  expect_word("NFG");
  expect_word("1");
  {
    NfgToken t = lex.Next();
    if (t.kind == NfgToken::kWord && t.text == "D")
      throw ParseError("only the 'R' payoff variant is supported", t.line,
                       t.column);
    if (t.kind != NfgToken::kWord || t.text != "R")
      throw ParseError("expected 'R', found '" + t.text + "'", t.line, t.column);
  }
  GameLabels labels;
  labels.title = expect(NfgToken::kString, "a quoted title").text;

  expect(NfgToken::kOpen, "'{' before player names");
  while (true) {
    NfgToken t = lex.Next();
    if (t.kind == NfgToken::kClose) break;
    if (t.kind != NfgToken::kString)
      throw ParseError("expected a quoted player name", t.line, t.column);
    labels.players.push_back(t.text);
  }
  const int n = static_cast<int>(labels.players.size());
  if (n < 2) throw ParseError("a game needs at least two players");

  std::vector<int> counts;
  expect(NfgToken::kOpen, "'{' before strategies");
  NfgToken t = lex.Next();
  if (t.kind == NfgToken::kOpen) {
    // Named strategies: { { "a" "b" } { "c" "d" } }
    while (true) {
      std::vector<std::string> names;
      while (true) {
        NfgToken s = lex.Next();
        if (s.kind == NfgToken::kClose) break;
        if (s.kind != NfgToken::kString)
          throw ParseError("expected a quoted strategy name", s.line, s.column);
        names.push_back(s.text);
      }
      counts.push_back(static_cast<int>(names.size()));
      labels.actions.push_back(std::move(names));
      NfgToken next = lex.Next();
      if (next.kind == NfgToken::kClose) break;
      if (next.kind != NfgToken::kOpen)
        throw ParseError("expected '{' or '}'", next.line, next.column);
    }
  } else {
    while (t.kind != NfgToken::kClose) {
      if (t.kind != NfgToken::kWord)
        throw ParseError("expected an action count", t.line, t.column);
      const double v = internal::ParseNumber(t);
      if (v != std::floor(v) || v < 1)
        throw ParseError("action count must be a positive integer", t.line,
                         t.column);
      counts.push_back(static_cast<int>(v));
      t = lex.Next();
    }
  }
  if (static_cast<int>(counts.size()) != n)
    throw ParseError("found " + std::to_string(counts.size()) +
                     " action counts for " + std::to_string(n) + " players");

  std::string comment;
  std::vector<double> values;
  NfgToken first = lex.Next();
  if (first.kind == NfgToken::kString) {
    comment = first.text;
    first = lex.Next();
  }
  for (NfgToken v = first; v.kind != NfgToken::kEnd; v = lex.Next()) {
    if (v.kind != NfgToken::kWord)
      throw ParseError("expected a payoff, found '" + v.text + "'", v.line,
                       v.column);
    values.push_back(internal::ParseNumber(v));
  }

  std::int64_t joint = 1;
  for (int m : counts) {
    if (m < 1) throw ParseError("action counts must be positive");
    joint *= m;
    if (joint > kMaxTensorEntries) throw SizeError("game in file is too large");
  }
  const std::int64_t expected = joint * n;
  if (static_cast<std::int64_t>(values.size()) != expected)
    throw ParseError("expected " + std::to_string(expected) +
                     " payoffs, found " + std::to_string(values.size()));

  // Gambit lists profiles with the first player's action varying fastest.
  std::vector<std::vector<double>> tensors(n, std::vector<double>(joint));
  std::vector<int> a(n, 0);
  std::vector<std::int64_t> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * counts[k + 1];
  for (std::int64_t p = 0; p < joint; ++p) {
    std::int64_t idx = 0;
    for (int k = 0; k < n; ++k) idx += a[k] * stride[k];
    for (int k = 0; k < n; ++k) tensors[k][idx] = values[p * n + k];
    for (int k = 0; k < n; ++k) {
      if (++a[k] < counts[k]) break;
      a[k] = 0;
    }
  }
  std::string title = labels.title;
  NormalFormGame raw(counts, std::move(tensors), labels);
  NormalFormGame normalized = NormalizePayoffs(raw);
  return {GameFormat::kNfg, std::move(raw), std::move(normalized),
          std::move(title), std::move(comment)};
}

inline std::string EmitNfg(const NormalFormGame& game,
                           const std::string& comment = "") {
  using internal::QuoteNfg;
  const int n = game.num_players();
  const GameLabels& labels = game.labels();
  std::ostringstream out;
  out << "NFG 1 R " << QuoteNfg(labels.title) << " {";
  for (int k = 0; k < n; ++k)
    out << ' '
        << QuoteNfg(labels.players.empty() ? "Player " + std::to_string(k + 1)
                                           : labels.players[k]);
  out << " }";
  if (!labels.actions.empty()) {
    out << "\n{";
    for (int k = 0; k < n; ++k) {
      out << " {";
      for (const auto& s : labels.actions[k]) out << ' ' << QuoteNfg(s);
      out << " }";
    }
    out << " }\n";
  } else {
    out << " {";
    for (int m : game.action_counts()) out << ' ' << m;
    out << " }\n";
  }
  out << QuoteNfg(comment) << "\n\n";
  std::vector<int> a(n, 0);
  for (std::int64_t p = 0; p < game.num_joint_actions(); ++p) {
    const std::int64_t idx = game.JointIndex(a);
    for (int k = 0; k < n; ++k) {
      if (p > 0 || k > 0) out << ' ';
      out << internal::FormatDouble17(game.payoff(k, idx));
    }
    for (int k = 0; k < n; ++k) {
      if (++a[k] < game.num_actions(k)) break;
      a[k] = 0;
    }
  }
  out << '\n';
  return out.str();
}

namespace internal {

inline nlohmann::json NestTensor(const NormalFormGame& game, int k, int axis,
                                 std::int64_t base) {
  nlohmann::json arr = nlohmann::json::array();
  for (int a = 0; a < game.num_actions(axis); ++a) {
    const std::int64_t idx = base + a * game.stride(axis);
    if (axis == game.num_players() - 1)
      arr.push_back(game.payoff(k, idx));
    else
      arr.push_back(NestTensor(game, k, axis + 1, idx));
  }
  return arr;
}

inline void FlattenTensor(const nlohmann::json& j, const std::vector<int>& counts,
                          int axis, const std::string& path,
                          std::vector<double>& out) {
  if (!j.is_array())
    throw ParseError(path + ": expected an array");
  if (static_cast<int>(j.size()) != counts[axis])
    throw ParseError(path + ": expected " + std::to_string(counts[axis]) +
                     " entries along axis " + std::to_string(axis) + ", found " +
                     std::to_string(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (axis + 1 == static_cast<int>(counts.size())) {
      if (!j[i].is_number()) throw ParseError(p + ": expected a number");
      out.push_back(j[i].get<double>());
    } else {
      FlattenTensor(j[i], counts, axis + 1, p, out);
    }
  }
}

}  // namespace internal

inline std::string EmitJson(const NormalFormGame& game, bool normalized = true) {
  nlohmann::json doc;
  doc["players"] = game.num_players();
  doc["action_counts"] = game.action_counts();
  nlohmann::json tensors = nlohmann::json::array();
  for (int k = 0; k < game.num_players(); ++k)
    tensors.push_back(internal::NestTensor(game, k, 0, 0));
  doc["tensors"] = std::move(tensors);
  nlohmann::json labels = nlohmann::json::object();
  labels["title"] = game.labels().title;
  labels["players"] = game.labels().players;
  labels["actions"] = game.labels().actions;
  doc["labels"] = std::move(labels);
  doc["normalized"] = normalized;
  return doc.dump(1) + "\n";
}

// Parses the JSON format. If the file declares "normalized": false and
// `normalize` is set, the returned `game` is the normalized view; otherwise it
// equals `raw`.
inline GameDocument ParseJson(std::string_view text, bool normalize = false) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("/: expected an object");
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key))
      throw ParseError(std::string("/") + key + ": missing required key");
    return doc[key];
  };
  const auto& players = require("players");
  if (!players.is_number_integer())
    throw ParseError("/players: expected an integer");
  const auto& jc = require("action_counts");
  if (!jc.is_array()) throw ParseError("/action_counts: expected an array");
  std::vector<int> counts;
  for (std::size_t i = 0; i < jc.size(); ++i) {
    if (!jc[i].is_number_integer() || jc[i].get<int>() < 1)
      throw ParseError("/action_counts/" + std::to_string(i) +
                       ": expected a positive integer");
    counts.push_back(jc[i].get<int>());
  }
  const int n = players.get<int>();
  if (static_cast<int>(counts.size()) != n)
    throw ParseError("/action_counts: length " + std::to_string(counts.size()) +
                     " does not match players = " + std::to_string(n));
  std::int64_t joint = 1;
  for (int m : counts) {
    joint *= m;
    if (joint > kMaxTensorEntries) throw SizeError("game in file is too large");
  }
  const auto& jt = require("tensors");
  if (!jt.is_array() || static_cast<int>(jt.size()) != n)
    throw ParseError("/tensors: expected an array of " + std::to_string(n) +
                     " tensors");
  std::vector<std::vector<double>> tensors(n);
  for (int k = 0; k < n; ++k)
    internal::FlattenTensor(jt[k], counts, 0, "/tensors/" + std::to_string(k),
                            tensors[k]);

  GameLabels labels;
  if (doc.contains("labels")) {
    const auto& jl = doc["labels"];
    if (!jl.is_object()) throw ParseError("/labels: expected an object");
    try {
      if (jl.contains("title")) labels.title = jl["title"].get<std::string>();
      if (jl.contains("players"))
        labels.players = jl["players"].get<std::vector<std::string>>();
      if (jl.contains("actions"))
        labels.actions =
            jl["actions"].get<std::vector<std::vector<std::string>>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("/labels: ") + e.what());
    }
  }
  bool declared_normalized = true;
  if (doc.contains("normalized")) {
    if (!doc["normalized"].is_boolean())
      throw ParseError("/normalized: expected a boolean");
    declared_normalized = doc["normalized"].get<bool>();
  }
  std::string title = labels.title;
  NormalFormGame raw(counts, std::move(tensors), std::move(labels));
  if (declared_normalized && !raw.IsNormalized())
    throw ParseError("/tensors: payoffs outside [0,1] but normalized is true");
  NormalFormGame game =
      (!declared_normalized && normalize) ? NormalizePayoffs(raw) : raw;
  return {GameFormat::kJson, std::move(raw), std::move(game), std::move(title),
          ""};
}

inline std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

inline void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

// Loads a .nfg or .json file. The returned game is normalized in both cases.
inline GameDocument LoadGameFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".nfg")) return ParseNfg(text);
  if (ends_with(".json")) return ParseJson(text, /*normalize=*/true);
  throw IoError("unrecognized game file extension for '" + path +
                "' (expected .nfg or .game.json)");
}

}  // namespace nashstoch

#endif  // NASHSTOCH_IO_HPP_
