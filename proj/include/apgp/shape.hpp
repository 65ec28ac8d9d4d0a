#pragma once

#include <string>
#include <string_view>

#include "apgp/errors.hpp"

namespace apgp {

// Level-5 abstract shape: a balanced square-bracket string such as
// "[[][]]", or the single token "_" naming the open chain (no pairs).
class AbstractShape {
  public:
    static constexpr std::string_view open_chain_token = "_";

    explicit AbstractShape(std::string brackets) : text_(std::move(brackets)) {
        if (text_.empty()) throw EmptyShape("abstract shape is empty");
        if (text_ == open_chain_token) return;
        int depth = 0;
        for (const char c : text_) {
            if (c == '[') {
                ++depth;
            } else if (c == ']') {
                if (--depth < 0) throw MalformedStructure("unbalanced ']' in shape " + text_);
            } else {
                throw MalformedStructure(std::string("invalid shape symbol '") + c + "' in " + text_);
            }
        }
        if (depth != 0) throw MalformedStructure("unclosed '[' in shape " + text_);
    }

    const std::string& str() const noexcept { return text_; }
    std::string_view view() const noexcept { return text_; }
    bool is_open_chain() const noexcept { return text_ == open_chain_token; }

    friend bool operator==(const AbstractShape&, const AbstractShape&) = default;
    friend auto operator<=>(const AbstractShape& a, const AbstractShape& b) {
        return a.text_ <=> b.text_;
    }

  private:
    std::string text_;
};

}  // namespace apgp
