#include "forge/corpus.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

namespace forge::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Source source) {
  switch (source) {
    case Source::wikipedia: return "wikipedia";
    case Source::wikidoc: return "wikidoc";
    case Source::wikem: return "wikem";
    case Source::other: return "other";
  }
  return "other";
}

Source parse_source(std::string_view name) {
  if (name == "wikipedia") return Source::wikipedia;
  if (name == "wikidoc") return Source::wikidoc;
  if (name == "wikem") return Source::wikem;
  if (name == "other") return Source::other;
  throw ValidationError("unknown source '" + std::string(name) + "'");
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

namespace {

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

DocRecord record_from_json(const json& obj) {
  if (!obj.is_object()) throw ValidationError("record must be a JSON object");
  DocRecord rec;
  rec.id = require_string(obj, "id");
  if (rec.id.empty()) throw ValidationError("field \"id\" is empty");
  rec.title = require_string(obj, "title");
  if (collapse_whitespace(rec.title).empty()) throw ValidationError("field \"title\" is blank");

  const json& paras = require(obj, "paragraphs");
  if (!paras.is_array()) throw ValidationError("field \"paragraphs\" must be an array");
  for (const json& p : paras) {
    if (!p.is_string()) throw ValidationError("paragraphs must be strings");
    rec.paragraphs.push_back(p.get<std::string>());
  }

  rec.source = parse_source(require_string(obj, "source"));

  if (auto it = obj.find("meta"); it != obj.end()) {
    if (!it->is_object()) throw ValidationError("field \"meta\" must be an object");
    auto flag = [&](const char* key) {
      auto f = it->find(key);
      if (f == it->end()) return false;
      if (!f->is_boolean()) throw ValidationError(std::string("meta.") + key + " must be a boolean");
      return f->get<bool>();
    };
    rec.meta.is_person = flag("is_person");
    rec.meta.is_organization = flag("is_organization");
    rec.meta.is_year = flag("is_year");
  }
  return rec;
}

bool is_blank(std::string_view line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

ParseResult parse_records(std::istream& in) {
  ParseResult result;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    try {
      json obj = json::parse(line);
      DocRecord rec = record_from_json(obj);
      auto [it, inserted] = first_line.emplace(rec.id, line_no);
      if (!inserted) {
        throw ValidationError("duplicate id \"" + rec.id + "\" (first seen on line " +
                              std::to_string(it->second) + ")");
      }
      result.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      result.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const ValidationError& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw IoError("read failure while parsing records");
  return result;
}

ParseResult parse_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return parse_records(in);
}

std::string serialize_record(const DocRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["title"] = record.title;
  obj["paragraphs"] = record.paragraphs;
  obj["source"] = std::string(to_string(record.source));
  obj["meta"] = ordered_json{{"is_person", record.meta.is_person},
                             {"is_organization", record.meta.is_organization},
                             {"is_year", record.meta.is_year}};
  return obj.dump();
}

void write_records(std::ostream& out, const std::vector<DocRecord>& records) {
  for (const auto& rec : records) out << serialize_record(rec) << '\n';
}

bool is_year_title(std::string_view title) {
  std::string t = collapse_whitespace(title);
  if (t.size() < 3 || t.size() > 4) return false;
  for (char c : t)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

FilterResult filter_records(const std::vector<DocRecord>& records, const FilterRules& rules) {
  FilterResult out;
  out.stats.records_in = records.size();
  for (const auto& rec : records) {
    const char* rule = nullptr;
    std::size_t long_paragraphs = 0;
    for (const auto& p : rec.paragraphs)
      if (count_words(p) >= std::max<std::size_t>(rules.min_words, 1)) ++long_paragraphs;

    if (rules.drop_persons && rec.meta.is_person) {
      rule = "person";
    } else if (rules.drop_organizations && rec.meta.is_organization) {
      rule = "organization";
    } else if (rules.drop_years && (rec.meta.is_year || is_year_title(rec.title))) {
      rule = "year";
    } else if (rules.min_words > 0 && long_paragraphs == 0) {
      rule = "no_paragraphs";
    }

    if (rule) {
      ++out.stats.dropped_by_rule[rule];
      continue;
    }
    out.stats.paragraphs_kept += long_paragraphs;
    out.records.push_back(rec);
  }
  out.stats.records_kept = out.records.size();
  return out;
}

std::vector<TitledParagraph> extract_paragraphs(const DocRecord& record, std::size_t min_words) {
  if (min_words == 0) throw ValidationError("min_words must be at least 1");
  std::vector<TitledParagraph> pairs;
  for (std::size_t i = 0; i < record.paragraphs.size(); ++i) {
    if (count_words(record.paragraphs[i]) >= min_words)
      pairs.push_back({record.title, record.paragraphs[i], i});
  }
  return pairs;
}

}  // namespace forge::corpus
