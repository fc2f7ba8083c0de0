#include "iris/irparse.hpp"

#include "iris/errors.hpp"
#include "internal/ctoken.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace iris {

namespace {

using detail::CToken;
using detail::CTokenStream;

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

struct Line {
    std::size_t begin; // offset of first char
    std::size_t end;   // offset one past the last char, excluding the newline
};

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            if (pos < text.size())
                lines.push_back({pos, text.size()});
            break;
        }
        lines.push_back({pos, nl});
        pos = nl + 1;
    }
    return lines;
}

std::string_view view_of(const std::string& text, const Line& l) {
    return std::string_view(text).substr(l.begin, l.end - l.begin);
}

// Offset of the char after the brace matching text[open] ('{'), skipping
// string/char literals and (for LLVM) ';' comments. npos when unbalanced.
std::size_t match_brace(const std::string& text, std::size_t open, bool skip_semicolon_comments) {
    int depth = 0;
    std::size_t i = open;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '"' || c == '\'') {
            i = CTokenStream::skip_c_literal(text, i);
            continue;
        }
        if (skip_semicolon_comments && c == ';') {
            while (i < text.size() && text[i] != '\n')
                ++i;
            continue;
        }
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0)
                return i + 1;
        }
        ++i;
    }
    return std::string::npos;
}

std::string gimple_name_from_header(std::string_view header) {
    const std::size_t paren = header.find('(');
    if (paren == std::string_view::npos)
        return {};
    std::string_view head = header.substr(0, paren);
    while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back())))
        head.remove_suffix(1);
    const std::size_t ws = head.find_last_of(" \t");
    std::string_view name = (ws == std::string_view::npos) ? head : head.substr(ws + 1);
    while (!name.empty() && name.front() == '*')
        name.remove_prefix(1);
    return std::string(name);
}

std::string llvm_symbol_from_define(std::string_view header) {
    const std::size_t at = header.find('@');
    if (at == std::string_view::npos)
        return {};
    std::size_t i = at + 1;
    if (i < header.size() && header[i] == '"') {
        std::string out;
        ++i;
        while (i < header.size() && header[i] != '"') {
            if (header[i] == '\\' && i + 1 < header.size())
                ++i;
            out.push_back(header[i]);
            ++i;
        }
        return out;
    }
    const auto is_sym = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '$' ||
               c == '.' || c == '_';
    };
    std::size_t j = i;
    while (j < header.size() && is_sym(header[j]))
        ++j;
    return std::string(header.substr(i, j - i));
}

} // namespace

std::vector<GimpleFunction> parse_gimple_dump(const std::string& dump) {
    if (dump.find_first_not_of(" \t\r\n") == std::string::npos)
        throw EmptyDump("empty GIMPLE dump");

    const std::vector<Line> lines = split_lines(dump);
    std::vector<GimpleFunction> out;

    std::size_t li = 0;
    while (li < lines.size()) {
        const std::string_view line = view_of(dump, lines[li]);
        if (line.empty() || line[0] != '{') {
            ++li;
            continue;
        }
        // Signature is the line directly above; attribute lines may sit above it.
        if (li == 0) {
            ++li;
            continue;
        }
        const std::string_view sig = view_of(dump, lines[li - 1]);
        if (is_blank(sig) || sig[0] == '}' || sig.find('(') == std::string_view::npos) {
            ++li;
            continue;
        }
        const std::string name = gimple_name_from_header(sig);
        if (name.empty()) {
            ++li;
            continue;
        }
        std::size_t block_top = li - 1;
        while (block_top > 0) {
            const std::string_view above = view_of(dump, lines[block_top - 1]);
            if (is_blank(above) || above[0] == '}' || above[0] == '{')
                break;
            --block_top;
        }

        const std::size_t open = lines[li].begin;
        const std::size_t close = match_brace(dump, open, /*skip_semicolon_comments=*/false);
        if (close == std::string::npos)
            throw UnbalancedBraces(open, "unbalanced braces in GIMPLE dump");

        GimpleFunction fn;
        fn.name = name;
        fn.header = std::string(sig);
        fn.span_begin = lines[block_top].begin;
        fn.span_end = close;
        fn.body = dump.substr(fn.span_begin, fn.span_end - fn.span_begin);
        out.push_back(std::move(fn));

        while (li < lines.size() && lines[li].begin < close)
            ++li;
    }
    return out;
}

LlvmModule parse_llvm_module(const std::string& module_text) {
    if (module_text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw EmptyModule("empty LLVM module");

    const std::vector<Line> lines = split_lines(module_text);
    LlvmModule mod;
    std::size_t prev_end = std::string::npos; // end of the last function span

    std::size_t li = 0;
    while (li < lines.size()) {
        const std::string_view line = view_of(module_text, lines[li]);
        if (!line.starts_with("define") ||
            (line.size() > 6 && line[6] != ' ' && line[6] != '\t')) {
            ++li;
            continue;
        }
        const std::size_t fn_start = lines[li].begin;
        std::size_t open = module_text.find('{', fn_start);
        // a '{' inside a string on the define line would be pathological;
        // defines emitted by clang always end the header line with '{'
        if (open == std::string::npos)
            throw UnbalancedBraces(fn_start, "define without opening brace");
        const std::size_t close = match_brace(module_text, open, /*skip_semicolon_comments=*/true);
        if (close == std::string::npos)
            throw UnbalancedBraces(open, "unbalanced braces in LLVM function");

        LlvmFunction fn;
        fn.define_header = std::string(line);
        fn.symbol = llvm_symbol_from_define(line);
        fn.span_begin = fn_start;
        fn.span_end = close;
        fn.body = module_text.substr(fn_start, close - fn_start);
        if (prev_end == std::string::npos) {
            mod.prelude.header_text = module_text.substr(0, fn_start);
        } else {
            fn.leading_text = module_text.substr(prev_end, fn_start - prev_end);
        }
        prev_end = close;
        mod.functions.push_back(std::move(fn));

        while (li < lines.size() && lines[li].begin < close)
            ++li;
    }

    if (prev_end == std::string::npos)
        mod.prelude.header_text = module_text;
    else
        mod.prelude.trailer_text = module_text.substr(prev_end);
    return mod;
}

std::string reassemble_module(const LlvmModule& module) {
    std::string out = module.prelude.header_text;
    for (const auto& fn : module.functions) {
        out += fn.leading_text;
        out += fn.body;
    }
    out += module.prelude.trailer_text;
    return out;
}

CScanResult scan_c_functions(const std::string& c_source) {
    CScanResult result;
    CTokenStream ts(c_source);

    struct ParenCtx {
        std::string name; // identifier before '(' when plausible
    };
    std::vector<ParenCtx> paren_stack;

    std::string stmt_name;          // best function-name candidate this statement
    std::size_t stmt_start = 0;
    bool stmt_start_pending = true; // next token begins the statement
    std::string recent_group;       // survives ';' for K&R detection
    bool gap_decl_ish = true;       // tokens since recent_group are declaration-like
    CToken prev;

    const auto consume_balanced = [&](std::size_t open_pos) -> std::size_t {
        int depth = 1;
        CToken t;
        std::size_t last_end = open_pos + 1;
        while ((t = ts.next()).kind != CToken::Kind::end) {
            last_end = t.pos + t.text.size();
            if (t.kind == CToken::Kind::punct) {
                if (t.is("{"))
                    ++depth;
                else if (t.is("}")) {
                    --depth;
                    if (depth == 0)
                        return last_end;
                }
            }
        }
        throw UnbalancedBraces(open_pos, "unbalanced braces in C source");
    };

    CToken tok;
    while ((tok = ts.next()).kind != CToken::Kind::end) {
        if (stmt_start_pending) {
            stmt_start = tok.pos;
            stmt_start_pending = false;
        }

        if (tok.kind == CToken::Kind::punct) {
            if (tok.is("(")) {
                ParenCtx ctx;
                if (prev.kind == CToken::Kind::ident && !detail::is_c_keyword(prev.text) &&
                    prev.text != "__attribute__" && prev.text != "__declspec")
                    ctx.name = std::string(prev.text);
                paren_stack.push_back(std::move(ctx));
            } else if (tok.is(")")) {
                if (!paren_stack.empty()) {
                    if (!paren_stack.back().name.empty() && paren_stack.size() == 1) {
                        stmt_name = paren_stack.back().name;
                        recent_group = stmt_name;
                        gap_decl_ish = true;
                    }
                    paren_stack.pop_back();
                }
            } else if (tok.is("{") && paren_stack.empty()) {
                if (prev.kind == CToken::Kind::punct && prev.is(")") && !stmt_name.empty()) {
                    const std::size_t body_end = consume_balanced(tok.pos);
                    CFunction fn;
                    fn.name = stmt_name;
                    fn.span_begin = stmt_start;
                    fn.span_end = body_end;
                    fn.text = c_source.substr(stmt_start, body_end - stmt_start);
                    result.functions.push_back(std::move(fn));
                    stmt_name.clear();
                    recent_group.clear();
                    stmt_start_pending = true;
                    prev = CToken{};
                    continue;
                }
                if (prev.kind == CToken::Kind::punct && prev.is(";") && !recent_group.empty() &&
                    gap_decl_ish) {
                    // K&R-style definition: parameter declarations between the
                    // parameter list and the body. Reported, not parsed.
                    consume_balanced(tok.pos);
                    result.unparsed.push_back("offset " + std::to_string(stmt_start) +
                                              ": K&R-style definition of '" + recent_group +
                                              "' not parsed");
                    stmt_name.clear();
                    recent_group.clear();
                    stmt_start_pending = true;
                    prev = CToken{};
                    continue;
                }
                // struct/union/enum definition or brace initializer: part of
                // the enclosing statement, consumed in place.
                consume_balanced(tok.pos);
                prev = CToken{};
                prev.kind = CToken::Kind::punct;
                prev.text = "}";
                continue;
            } else if (tok.is(";") && paren_stack.empty()) {
                stmt_name.clear();
                stmt_start_pending = true;
            }
        }

        if (!recent_group.empty()) {
            const bool decl_ok =
                tok.kind == CToken::Kind::ident || tok.kind == CToken::Kind::number ||
                (tok.kind == CToken::Kind::punct &&
                 (tok.is(";") || tok.is(",") || tok.is("*") || tok.is("[") || tok.is("]") ||
                  tok.is(")") || tok.is("{")));
            if (!decl_ok)
                gap_decl_ish = false;
        }
        prev = tok;
    }
    return result;
}

std::vector<std::pair<std::string, std::string>> extract_c_functions(const std::string& c_source) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto& fn : scan_c_functions(c_source).functions)
        out.emplace_back(std::move(fn.name), std::move(fn.text));
    return out;
}

namespace {

std::string normalize_symbol(std::string_view name) {
    if (!name.empty() && name.front() == '_')
        name.remove_prefix(1);
    return std::string(name);
}

bool is_clone_name(std::string_view name) {
    // C-linkage identifiers cannot contain '.'; dotted names are
    // compiler-generated clones (foo.constprop.0, foo.part.1, ...).
    return name.find('.') != std::string_view::npos;
}

} // namespace

AlignmentResult align_functions(const std::vector<GimpleFunction>& gimple_fns,
                                const std::vector<LlvmFunction>& llvm_fns,
                                const std::vector<std::pair<std::string, std::string>>& c_fns,
                                const std::string& origin) {
    AlignmentResult result;

    const auto build_map = [&](auto names_of, const auto& list, const char* side) {
        std::map<std::string, std::size_t> m;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string raw = names_of(list[i]);
            if (is_clone_name(raw)) {
                result.excluded_clones.push_back(std::string(side) + ": " + raw);
                continue;
            }
            const std::string key = normalize_symbol(raw);
            if (!m.emplace(key, i).second)
                throw DuplicateSymbol("symbol '" + key + "' appears twice in " + side +
                                      " function list");
        }
        return m;
    };

    const auto g_map = build_map([](const GimpleFunction& f) { return f.name; }, gimple_fns, "gimple");
    const auto l_map = build_map([](const LlvmFunction& f) { return f.symbol; }, llvm_fns, "llvm");
    const auto c_map = build_map([](const std::pair<std::string, std::string>& f) { return f.first; },
                                 c_fns, "c");

    for (const auto& [name, text] : c_fns) {
        if (is_clone_name(name))
            continue;
        const std::string key = normalize_symbol(name);
        const auto g = g_map.find(key);
        const auto l = l_map.find(key);
        if (g != g_map.end() && l != l_map.end()) {
            FunctionTriplet t;
            t.c_function = text;
            t.gimple_function = gimple_fns[g->second];
            t.llvm_function = llvm_fns[l->second];
            t.origin = origin;
            result.triplets.push_back(std::move(t));
        }
    }

    const auto note_unmatched = [&](const std::string& key) {
        std::string missing;
        if (!c_map.count(key))
            missing += "c,";
        if (!g_map.count(key))
            missing += "gimple,";
        if (!l_map.count(key))
            missing += "llvm,";
        if (missing.empty())
            return;
        missing.pop_back();
        const std::string entry = key + " (missing: " + missing + ")";
        if (std::find(result.unmatched.begin(), result.unmatched.end(), entry) ==
            result.unmatched.end())
            result.unmatched.push_back(entry);
    };
    for (const auto& [key, _] : c_map)
        note_unmatched(key);
    for (const auto& [key, _] : g_map)
        note_unmatched(key);
    for (const auto& [key, _] : l_map)
        note_unmatched(key);

    return result;
}

} // namespace iris
