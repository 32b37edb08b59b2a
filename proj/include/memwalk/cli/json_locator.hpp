#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace memwalk::cli {

/// Line numbers of keys and array elements in a JSON document, for error messages.
/// Paths are dotted keys with bracketed indices: "sim.x0[1]". The text must already be
/// well-formed JSON (the scanner does not validate).
class JsonLocator {
 public:
  JsonLocator() = default;
  explicit JsonLocator(std::string_view text);

  /// 1-based line of the path, 0 when the path does not occur in the text.
  int line_of(const std::string& path) const;

  /// Paths that occur more than once in the same object.
  const std::vector<std::string>& duplicates() const { return duplicates_; }

 private:
  void value(const std::string& path);
  void object(const std::string& path);
  void array(const std::string& path);
  std::string string_token();
  void skip_ws();
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void advance();

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
  std::vector<std::string> duplicates_;
};

}  // namespace memwalk::cli
