// Copyright 2026 The Unicap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "harness/run_config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "common/error.h"
#include "common/strings.h"

namespace unicap {
namespace {

[[noreturn]] void BadValue(std::string_view key, std::string_view want, std::string_view value) {
  throw ValidationError(std::string(key) + ": expected " + std::string(want) + ", got '" + std::string(value) + "'");
}

template <typename N>
void ParseNumber(std::string_view key, std::string_view value, N& out, std::string_view want) {
  N v{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) BadValue(key, want, value);
  out = v;
}

void ParseValue(std::string_view key, std::string_view v, int& out) { ParseNumber(key, v, out, "an integer"); }
void ParseValue(std::string_view key, std::string_view v, uint64_t& out) {
  ParseNumber(key, v, out, "a non-negative integer");
}
void ParseValue(std::string_view key, std::string_view v, double& out) { ParseNumber(key, v, out, "a number"); }
void ParseValue(std::string_view key, std::string_view v, bool& out) {
  if (v == "true" || v == "1") {
    out = true;
  } else if (v == "false" || v == "0") {
    out = false;
  } else {
    BadValue(key, "true or false", v);
  }
}
void ParseValue(std::string_view, std::string_view v, std::string& out) { out = std::string(v); }
void ParseValue(std::string_view key, std::string_view v, Ablation& out) {
  try {
    out = ParseAblation(v);
  } catch (const ValidationError&) {
    BadValue(key, "one of align-only, mle, joint-l2, joint-robust, joint-adv", v);
  }
}
void ParseValue(std::string_view key, std::string_view v, CriticPolarity& out) {
  try {
    out = ParsePolarity(v);
  } catch (const ValidationError&) {
    BadValue(key, "standard or swapped", v);
  }
}

std::string Format(int v) { return std::to_string(v); }
std::string Format(uint64_t v) { return std::to_string(v); }
std::string Format(double v) { return FormatDouble(v); }
std::string Format(bool v) { return v ? "true" : "false"; }
std::string Format(const std::string& v) { return v; }
std::string Format(Ablation v) { return std::string(AblationName(v)); }
std::string Format(CriticPolarity v) { return std::string(PolarityName(v)); }

struct Field {
  std::string key;
  bool is_path = false;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

// ref is a generic lambda returning a reference into the config.
template <typename Ref>
Field Make(std::string key, Ref ref, bool is_path = false) {
  Field f;
  f.key = key;
  f.is_path = is_path;
  f.set = [key, ref](RunConfig& c, std::string_view v) { ParseValue(key, v, ref(c)); };
  f.get = [ref](const RunConfig& c) { return Format(ref(c)); };
  return f;
}

#define UNICAP_FIELD(key, member) Make(key, [](auto& c) -> auto& { return c.member; })
#define UNICAP_PATH(key, member) Make(key, [](auto& c) -> auto& { return c.member; }, true)

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      UNICAP_FIELD("seed", seed),
      UNICAP_PATH("paths.corpus", paths.corpus),
      UNICAP_PATH("paths.lexicon", paths.lexicon),
      UNICAP_PATH("paths.features", paths.features),
      UNICAP_PATH("paths.ids", paths.ids),
      UNICAP_PATH("paths.detections", paths.detections),
      UNICAP_PATH("paths.references", paths.references),
      UNICAP_PATH("paths.word_vectors", paths.word_vectors),
      UNICAP_FIELD("lexicon.strip_plural", lexicon.strip_plural),
      UNICAP_FIELD("text.min_count", text.min_count),
      UNICAP_FIELD("text.max_len", text.max_len),
      UNICAP_FIELD("lm.word_dim", lm.word_dim),
      UNICAP_FIELD("lm.hidden", lm.hidden),
      UNICAP_FIELD("lm.embed_dim", lm.embed_dim),
      UNICAP_FIELD("lm.margin", lm.margin),
      UNICAP_FIELD("lm.lambda_t", lm.lambda_t),
      UNICAP_FIELD("lm.batch", lm.batch),
      UNICAP_FIELD("lm.lr_enc", lm.lr_enc),
      UNICAP_FIELD("lm.lr_dec", lm.lr_dec),
      UNICAP_FIELD("lm.epochs", lm.epochs),
      UNICAP_FIELD("align.K", align.K),
      UNICAP_FIELD("align.lambda_ce", align.lambda_ce),
      UNICAP_FIELD("align.lambda_r", align.lambda_r),
      UNICAP_FIELD("align.lambda_adv", align.lambda_adv),
      UNICAP_FIELD("align.gp_coeff", align.gp_coeff),
      UNICAP_FIELD("align.critic_steps", align.critic_steps),
      UNICAP_FIELD("align.translator_hidden", align.translator_hidden),
      UNICAP_FIELD("align.critic_hidden", align.critic_hidden),
      UNICAP_FIELD("align.lr", align.lr),
      UNICAP_FIELD("align.critic_lr", align.critic_lr),
      UNICAP_FIELD("align.batch", align.batch),
      UNICAP_FIELD("align.epochs", align.epochs),
      UNICAP_FIELD("align.ablation", align.ablation),
      UNICAP_FIELD("align.critic_polarity", align.polarity),
      UNICAP_FIELD("decode.beam", decode.beam),
      UNICAP_FIELD("decode.max_len", decode.max_len),
      UNICAP_FIELD("decode.length_norm", decode.length_norm),
      UNICAP_FIELD("eval.oracle_runs", eval.oracle_runs),
      UNICAP_FIELD("eval.mixing_k", eval.mixing_k),
  };
  return fields;
}

#undef UNICAP_FIELD
#undef UNICAP_PATH

const Field& Find(std::string_view key) {
  for (const auto& f : Fields())
    if (f.key == key) return f;
  throw ValidationError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::Finalize() {
  lm.seed = seed;
  align.seed = seed;
  lm.word_vectors = paths.word_vectors;
}

void RunConfig::Validate() const {
  lm.Validate();
  align.Validate();
  if (text.min_count < 1) throw ValidationError("text.min_count must be >= 1");
  if (text.max_len < 1) throw ValidationError("text.max_len must be >= 1");
  if (decode.beam < 1) throw ValidationError("decode.beam must be >= 1");
  if (decode.max_len < 1) throw ValidationError("decode.max_len must be >= 1");
  if (eval.oracle_runs < 1) throw ValidationError("eval.oracle_runs must be >= 1");
  if (eval.mixing_k < 1) throw ValidationError("eval.mixing_k must be >= 1");
}

void RunConfig::Set(std::string_view key, std::string_view value) {
  Find(key).set(*this, value);
  Finalize();
}

std::string RunConfig::Get(std::string_view key) const { return Find(key).get(*this); }

const std::vector<std::string>& RunConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str(), path.string(), path.parent_path());
}

RunConfig RunConfig::Parse(std::string_view text, std::string_view source, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  int line_no = 0;
  for (const auto& raw : Split(text, '\n')) {
    ++line_no;
    const auto line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(where + "expected 'key = value'");
    const std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    try {
      const auto& f = Find(key);
      if (!seen.insert(key).second) throw ValidationError("duplicate key '" + key + "'");
      if (f.is_path && !value.empty() && !base_dir.empty() && std::filesystem::path(value).is_relative()) {
        value = (base_dir / value).lexically_normal().string();
      }
      f.set(c, value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  c.Finalize();
  c.Validate();
  return c;
}

std::string RunConfig::Echo() const {
  std::string out;
  for (const auto& f : Fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

}  // namespace unicap
