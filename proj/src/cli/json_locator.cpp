#include "memwalk/cli/json_locator.hpp"

namespace memwalk::cli {

JsonLocator::JsonLocator(std::string_view text) : text_(text) {
  skip_ws();
  if (pos_ < text_.size()) {
    value("");
  }
  text_ = {};
}

int JsonLocator::line_of(const std::string& path) const {
  const auto it = lines_.find(path);
  return it == lines_.end() ? 0 : it->second;
}

void JsonLocator::advance() {
  if (text_[pos_] == '\n') {
    ++line_;
  }
  ++pos_;
}

void JsonLocator::skip_ws() {
  while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                 text_[pos_] == '\r')) {
    advance();
  }
}

std::string JsonLocator::string_token() {
  std::string out;
  advance();  // opening quote
  while (pos_ < text_.size() && text_[pos_] != '"') {
    if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
      out += text_[pos_];
      advance();
    }
    out += text_[pos_];
    advance();
  }
  if (pos_ < text_.size()) {
    advance();
  }
  return out;
}

void JsonLocator::value(const std::string& path) {
  skip_ws();
  switch (peek()) {
    case '{':
      object(path);
      break;
    case '[':
      array(path);
      break;
    case '"':
      string_token();
      break;
    default:
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == ',' || c == '}' || c == ']' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
          break;
        }
        advance();
      }
  }
}

void JsonLocator::object(const std::string& path) {
  advance();
  skip_ws();
  if (peek() == '}') {
    advance();
    return;
  }
  while (pos_ < text_.size()) {
    skip_ws();
    const int line = line_;
    const std::string key = string_token();
    const std::string child = path.empty() ? key : path + "." + key;
    if (!lines_.emplace(child, line).second) {
      duplicates_.push_back(child);
    }
    skip_ws();
    if (peek() == ':') {
      advance();
    }
    value(child);
    skip_ws();
    if (peek() == ',') {
      advance();
      continue;
    }
    if (peek() == '}') {
      advance();
    }
    return;
  }
}

void JsonLocator::array(const std::string& path) {
  advance();
  skip_ws();
  if (peek() == ']') {
    advance();
    return;
  }
  for (int index = 0; pos_ < text_.size(); ++index) {
    skip_ws();
    lines_.emplace(path + "[" + std::to_string(index) + "]", line_);
    value(path + "[" + std::to_string(index) + "]");
    skip_ws();
    if (peek() == ',') {
      advance();
      continue;
    }
    if (peek() == ']') {
      advance();
    }
    return;
  }
}

}  // namespace memwalk::cli
