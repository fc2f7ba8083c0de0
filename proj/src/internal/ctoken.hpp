#pragma once

// Lexical token stream over C source: skips whitespace, comments, and
// preprocessor lines (with backslash continuations); string/char literals
// come out as single opaque tokens so brace counting never looks inside them.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>

namespace iris::detail {

struct CToken {
    enum class Kind { ident, number, literal, punct, end };
    Kind kind = Kind::end;
    std::string_view text;
    std::size_t pos = 0;

    bool is(std::string_view t) const { return text == t; }
};

inline bool is_c_keyword(std::string_view s) {
    static const std::unordered_set<std::string_view> kw = {
        "auto", "break", "case", "char", "const", "continue", "default", "do",
        "double", "else", "enum", "extern", "float", "for", "goto", "if",
        "inline", "int", "long", "register", "restrict", "return", "short",
        "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
        "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
        "_Noreturn", "_Static_assert", "_Thread_local",
    };
    return kw.count(s) > 0;
}

class CTokenStream {
public:
    explicit CTokenStream(std::string_view src) : s_(src) {}

    CToken next() {
        skip_trivia();
        CToken t;
        t.pos = i_;
        if (i_ >= s_.size())
            return t;

        const char c = s_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            t.kind = CToken::Kind::ident;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
            std::size_t j = i_;
            while (j < s_.size()) {
                const char d = s_[j];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '.' || d == '_') {
                    ++j;
                } else if ((d == '+' || d == '-') && j > i_ &&
                           (s_[j - 1] == 'e' || s_[j - 1] == 'E' ||
                            s_[j - 1] == 'p' || s_[j - 1] == 'P')) {
                    ++j; // exponent sign
                } else {
                    break;
                }
            }
            t.kind = CToken::Kind::number;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            return t;
        }
        if (c == '"' || c == '\'') {
            const std::size_t j = skip_c_literal(s_, i_);
            t.kind = CToken::Kind::literal;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            return t;
        }

        // longest-match punctuation
        static constexpr std::array<std::string_view, 3> three = {"<<=", ">>=", "..."};
        static constexpr std::array<std::string_view, 19> two = {
            "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=",
            "*=", "/=", "%=", "&=", "|=", "^=", "++", "--", "->"};
        for (const auto& p : three) {
            if (s_.compare(i_, p.size(), p) == 0) {
                t.kind = CToken::Kind::punct;
                t.text = s_.substr(i_, p.size());
                i_ += p.size();
                return t;
            }
        }
        for (const auto& p : two) {
            if (s_.compare(i_, p.size(), p) == 0) {
                t.kind = CToken::Kind::punct;
                t.text = s_.substr(i_, p.size());
                i_ += p.size();
                return t;
            }
        }
        t.kind = CToken::Kind::punct;
        t.text = s_.substr(i_, 1);
        i_ += 1;
        return t;
    }

    // Index just past the literal starting at s[i] (a '"' or '\'').
    static std::size_t skip_c_literal(std::string_view s, std::size_t i) {
        const char quote = s[i];
        ++i;
        while (i < s.size()) {
            if (s[i] == '\\' && i + 1 < s.size()) {
                i += 2;
            } else if (s[i] == quote) {
                return i + 1;
            } else if (s[i] == '\n') {
                return i; // unterminated; stop at EOL rather than eating the file
            } else {
                ++i;
            }
        }
        return i;
    }

private:
    void skip_trivia() {
        bool progressed = true;
        while (progressed && i_ < s_.size()) {
            progressed = false;
            while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
                if (s_[i_] == '\n')
                    at_line_start_ = true;
                ++i_;
                progressed = true;
            }
            if (i_ + 1 < s_.size() && s_[i_] == '/' && s_[i_ + 1] == '/') {
                while (i_ < s_.size() && s_[i_] != '\n')
                    ++i_;
                progressed = true;
                continue;
            }
            if (i_ + 1 < s_.size() && s_[i_] == '/' && s_[i_ + 1] == '*') {
                i_ += 2;
                while (i_ + 1 < s_.size() && !(s_[i_] == '*' && s_[i_ + 1] == '/'))
                    ++i_;
                i_ = (i_ + 1 < s_.size()) ? i_ + 2 : s_.size();
                progressed = true;
                continue;
            }
            if (i_ < s_.size() && s_[i_] == '#' && at_line_start_) {
                // whole preprocessor line, honoring backslash continuations
                while (i_ < s_.size()) {
                    if (s_[i_] == '\n') {
                        bool continued = false;
                        std::size_t j = i_;
                        while (j > 0 && (s_[j - 1] == '\r'))
                            --j;
                        if (j > 0 && s_[j - 1] == '\\')
                            continued = true;
                        ++i_;
                        if (!continued)
                            break;
                    } else {
                        ++i_;
                    }
                }
                at_line_start_ = true;
                progressed = true;
                continue;
            }
        }
        if (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])))
            at_line_start_ = false;
    }

    std::string_view s_;
    std::size_t i_ = 0;
    bool at_line_start_ = true;
};

} // namespace iris::detail
