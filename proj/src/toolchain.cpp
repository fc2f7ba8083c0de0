#include "iris/toolchain.hpp"

#include "iris/errors.hpp"
#include "iris/irparse.hpp"
#include "iris/subprocess.hpp"
#include "internal/ctoken.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace iris {

namespace {

namespace fs = std::filesystem;

bool is_executable_file(const fs::path& p) {
    std::error_code ec;
    return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::optional<fs::path> find_in_path(const std::string& name) {
    const char* path_env = std::getenv("PATH");
    if (path_env == nullptr)
        return std::nullopt;
    std::stringstream ss(path_env);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty())
            continue;
        const fs::path candidate = fs::path(dir) / name;
        if (is_executable_file(candidate))
            return candidate;
    }
    return std::nullopt;
}

// IRIS_TOOLCHAIN_DIR prefixes relative names; bare names also fall back to
// PATH lookup across the alternative spellings.
std::optional<fs::path> resolve_tool(const fs::path& configured,
                                     const std::vector<std::string>& alternatives) {
    std::vector<fs::path> candidates;
    candidates.push_back(configured);
    for (const auto& a : alternatives)
        candidates.emplace_back(a);

    const char* prefix = std::getenv("IRIS_TOOLCHAIN_DIR");
    for (const auto& c : candidates) {
        if (prefix != nullptr && *prefix != '\0' && c.is_relative()) {
            const fs::path prefixed = fs::path(prefix) / c;
            if (is_executable_file(prefixed))
                return prefixed;
        }
        if (c.is_absolute() || c.string().find('/') != std::string::npos) {
            if (is_executable_file(c))
                return c;
            continue;
        }
        if (auto found = find_in_path(c.string()))
            return found;
    }
    return std::nullopt;
}

RunResult run_tool(const ToolchainConfig& cfg, std::vector<std::string> argv,
                   const fs::path& cwd, const std::string& tool_label) {
    RunSpec spec;
    spec.argv = std::move(argv);
    spec.cwd = cwd;
    spec.timeout = cfg.timeout;
    RunResult r = run_process(spec);
    if (r.timed_out)
        throw Timeout(tool_label + " timed out after " +
                      std::to_string(cfg.timeout.count()) + " s");
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw DumpMissing("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw ConfigError("cannot write " + p.string());
}

std::string scrub_paths(std::string text, const fs::path& tmp) {
    const std::string needle = tmp.string();
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), kTranslationUnitToken);
        pos += std::string(kTranslationUnitToken).size();
    }
    return text;
}

const fs::path& frontend_compiler(const ToolchainConfig& cfg) {
    return cfg.gcc_path; // validation stores the resolved driver here
}

} // namespace

ToolchainConfig validate_toolchain(ToolchainConfig cfg) {
    const auto require = [](std::optional<fs::path> p, const std::string& what) {
        if (!p)
            throw ConfigError("required tool not found: " + what);
        return *p;
    };

    if (cfg.frontend_language == FrontendLanguage::c) {
        cfg.gcc_path = require(resolve_tool(cfg.gcc_path, {}), cfg.gcc_path.string());
    } else {
        cfg.gcc_path = require(resolve_tool(fs::path(cfg.frontend_driver), {}),
                               cfg.frontend_driver);
    }
    cfg.clang_path = require(resolve_tool(cfg.clang_path, {"clang-22", "clang-21", "clang-20",
                                                           "clang-19", "clang-18", "clang-17",
                                                           "clang-16", "clang-15", "clang-14"}),
                             cfg.clang_path.string());
    cfg.clangxx_path = require(resolve_tool(cfg.clangxx_path, {"clang++-22", "clang++-21",
                                                               "clang++-20", "clang++-19",
                                                               "clang++-18", "clang++-17",
                                                               "clang++-16", "clang++-15",
                                                               "clang++-14"}),
                               cfg.clangxx_path.string());

    // llc is optional: the clang driver runs the same backend over a .ll file
    // and yields the same accept/reject verdict.
    if (auto llc = resolve_tool(cfg.llc_path, {"llc-22", "llc-21", "llc-20", "llc-19", "llc-18",
                                               "llc-17", "llc-16", "llc-15", "llc-14", "llc-13",
                                               "llc-12", "llc-11"})) {
        cfg.llc_path = *llc;
        cfg.llc_is_clang_driver = false;
    } else {
        cfg.llc_path = cfg.clang_path;
        cfg.llc_is_clang_driver = true;
    }

    if (auto ctags = resolve_tool(cfg.ctags_path, {"universal-ctags", "exuberant-ctags",
                                                   "ctags-universal", "ctags-exuberant"})) {
        cfg.ctags_path = *ctags;
        cfg.ctags_available = true;
    } else {
        cfg.ctags_path.clear();
        cfg.ctags_available = false;
    }

    if (cfg.timeout <= std::chrono::duration<double>(0))
        throw ConfigError("toolchain timeout must be positive");
    cfg.validated = true;
    return cfg;
}

std::string dump_gimple(const std::string& source, const ToolchainConfig& cfg) {
    TempDir tmp("iris-gimple");
    const std::string unit = "unit" + cfg.source_extension;
    write_file(tmp.path() / unit, source);

    std::vector<std::string> argv = {frontend_compiler(cfg).string(), "-O0",
                                     "-fdump-tree-gimple", "-c", unit, "-o", "unit.o"};
    argv.insert(argv.end(), cfg.extra_gcc_flags.begin(), cfg.extra_gcc_flags.end());

    const RunResult r = run_tool(cfg, std::move(argv), tmp.path(), "gcc");
    if (r.exit_code != 0)
        throw ToolFailure("gcc", r.exit_code, sanitize_utf8(r.stderr_bytes));

    // gcc names the dump <input>.<NNN>t.gimple with a version-dependent pass
    // number; discover it by suffix.
    fs::path dump_path;
    for (const auto& entry : fs::directory_iterator(tmp.path())) {
        if (entry.path().filename().string().ends_with(".gimple")) {
            dump_path = entry.path();
            break;
        }
    }
    if (dump_path.empty())
        throw DumpMissing("gcc exited 0 but produced no .gimple dump");
    return scrub_paths(read_file(dump_path), tmp.path());
}

std::string dump_llvm_ir(const std::string& source, const ToolchainConfig& cfg) {
    TempDir tmp("iris-llvm");
    const std::string unit = "unit" + cfg.source_extension;
    write_file(tmp.path() / unit, source);

    std::vector<std::string> argv = {cfg.clang_path.string(), "-O0", "-S", "-emit-llvm",
                                     unit, "-o", "unit.ll"};
    argv.insert(argv.end(), cfg.extra_clang_flags.begin(), cfg.extra_clang_flags.end());

    const RunResult r = run_tool(cfg, std::move(argv), tmp.path(), "clang");
    if (r.exit_code != 0)
        throw ToolFailure("clang", r.exit_code, sanitize_utf8(r.stderr_bytes));

    const fs::path ll = tmp.path() / "unit.ll";
    if (!fs::exists(ll))
        throw DumpMissing("clang exited 0 but produced no .ll output");
    return scrub_paths(read_file(ll), tmp.path());
}

std::filesystem::path compile_ir_to_object(const std::string& llvm_ir,
                                           const ToolchainConfig& cfg,
                                           const std::filesystem::path& out_dir) {
    const fs::path ll = out_dir / "candidate.ll";
    const fs::path obj = out_dir / "candidate.o";
    write_file(ll, llvm_ir);

    std::vector<std::string> argv;
    if (cfg.llc_is_clang_driver)
        argv = {cfg.llc_path.string(), "-c", ll.string(), "-o", obj.string()};
    else
        argv = {cfg.llc_path.string(), "-filetype=obj", ll.string(), "-o", obj.string()};

    const RunResult r = run_tool(cfg, std::move(argv), out_dir, "llc");
    if (r.exit_code != 0 || !fs::exists(obj))
        throw IrRejected(sanitize_utf8(r.stderr_bytes));
    return obj;
}

std::filesystem::path link_with_wrapper(const std::filesystem::path& object,
                                        const std::string& wrapper_cpp,
                                        const ToolchainConfig& cfg,
                                        const std::filesystem::path& out_dir) {
    const fs::path wrapper = out_dir / "wrapper.cpp";
    const fs::path exe = out_dir / "prog";
    write_file(wrapper, wrapper_cpp);

    const RunResult r = run_tool(
        cfg, {cfg.clangxx_path.string(), wrapper.string(), object.string(), "-o", exe.string()},
        out_dir, "clang++");
    if (r.exit_code != 0 || !fs::exists(exe))
        throw LinkFailure(sanitize_utf8(r.stderr_bytes));
    return exe;
}

std::filesystem::path link_executable(const std::filesystem::path& object,
                                      const ToolchainConfig& cfg,
                                      const std::filesystem::path& out_dir) {
    const fs::path exe = out_dir / "prog";
    const RunResult r = run_tool(
        cfg, {cfg.clang_path.string(), object.string(), "-o", exe.string()}, out_dir, "clang");
    if (r.exit_code != 0 || !fs::exists(exe))
        throw LinkFailure(sanitize_utf8(r.stderr_bytes));
    return exe;
}

namespace {

// A file-scope declarator parsed out of one top-level statement.
struct TopLevelSymbol {
    std::string name;
    std::string declaration; // ready for an extern "C" block
    std::size_t order = 0;
};

std::string collapse_ws(std::string_view text) {
    std::string out;
    bool in_ws = false;
    for (const char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty())
            out.push_back(' ');
        in_ws = false;
        out.push_back(c);
    }
    return out;
}

// "int add(int a,int b)" -> "int add(int a, int b)"
std::string tidy_signature(std::string sig) {
    std::string out;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        out.push_back(sig[i]);
        if (sig[i] == ',' && i + 1 < sig.size() && sig[i + 1] != ' ')
            out.push_back(' ');
    }
    return out;
}

std::string strip_storage_specifiers(const std::string& decl) {
    detail::CTokenStream ts(decl);
    std::string out;
    detail::CToken t;
    std::size_t emitted_end = 0;
    while ((t = ts.next()).kind != detail::CToken::Kind::end) {
        if (t.kind == detail::CToken::Kind::ident &&
            (t.text == "static" || t.text == "inline" || t.text == "extern" ||
             t.text == "_Noreturn")) {
            continue;
        }
        const std::size_t start = t.pos;
        if (!out.empty() && start > emitted_end)
            out.push_back(' ');
        out.append(t.text);
        emitted_end = start + t.text.size();
    }
    return out;
}

// Scans file-scope variable definitions (not prototypes, typedefs, or bare
// struct definitions), producing extern declarations for the wrapper.
std::vector<TopLevelSymbol> scan_global_variables(const std::string& src,
                                                  const std::vector<CFunction>& functions) {
    using detail::CToken;
    std::vector<TopLevelSymbol> out;

    const auto inside_function = [&](std::size_t pos) {
        return std::any_of(functions.begin(), functions.end(), [&](const CFunction& f) {
            return pos >= f.span_begin && pos < f.span_end;
        });
    };

    detail::CTokenStream ts(src);
    CToken tok, prev;
    int paren_depth = 0;
    std::size_t stmt_start = std::string::npos;
    bool stmt_is_typedef = false;
    bool stmt_has_extern = false;
    std::vector<std::pair<std::string, bool>> declarators; // name, is_function
    std::string pending_ident;
    bool pending_is_function = false;
    std::size_t init_cut = std::string::npos; // position of a top-level '='

    const auto flush_declarator = [&]() {
        if (!pending_ident.empty())
            declarators.emplace_back(pending_ident, pending_is_function);
        pending_ident.clear();
        pending_is_function = false;
    };

    const auto end_statement = [&](std::size_t stmt_end) {
        flush_declarator();
        if (stmt_start != std::string::npos && !stmt_is_typedef && !stmt_has_extern) {
            for (const auto& [name, is_fn] : declarators) {
                if (is_fn)
                    continue; // prototype, not a variable
                const std::size_t cut = std::min(init_cut, stmt_end);
                std::string text = collapse_ws(
                    std::string_view(src).substr(stmt_start, cut - stmt_start));
                if (!text.empty()) {
                    TopLevelSymbol sym;
                    sym.name = name;
                    sym.declaration = "extern " + strip_storage_specifiers(text) + ";";
                    sym.order = stmt_start;
                    out.push_back(std::move(sym));
                }
            }
        }
        stmt_start = std::string::npos;
        stmt_is_typedef = false;
        stmt_has_extern = false;
        declarators.clear();
        init_cut = std::string::npos;
    };

    while ((tok = ts.next()).kind != CToken::Kind::end) {
        if (inside_function(tok.pos)) {
            prev = tok;
            continue;
        }
        if (stmt_start == std::string::npos) {
            stmt_start = tok.pos;
            init_cut = std::string::npos;
        }
        if (tok.kind == CToken::Kind::ident) {
            if (tok.is("typedef"))
                stmt_is_typedef = true;
            else if (tok.is("extern"))
                stmt_has_extern = true;
            else if (!detail::is_c_keyword(tok.text) && paren_depth == 0 &&
                     init_cut == std::string::npos)
                pending_ident = std::string(tok.text);
        } else if (tok.kind == CToken::Kind::punct) {
            if (tok.is("(")) {
                if (paren_depth == 0 && prev.kind == CToken::Kind::ident &&
                    prev.text == pending_ident)
                    pending_is_function = true;
                ++paren_depth;
            } else if (tok.is(")")) {
                paren_depth = std::max(0, paren_depth - 1);
            } else if (tok.is("{")) {
                // aggregate definition or initializer braces at file scope:
                // consume in place (function bodies were excluded above)
                int depth = 1;
                CToken t;
                while (depth > 0 && (t = ts.next()).kind != CToken::Kind::end) {
                    if (t.kind == CToken::Kind::punct) {
                        if (t.is("{"))
                            ++depth;
                        else if (t.is("}"))
                            --depth;
                    }
                }
            } else if (tok.is("=") && paren_depth == 0) {
                if (init_cut == std::string::npos)
                    init_cut = tok.pos;
                flush_declarator();
            } else if (tok.is(",") && paren_depth == 0) {
                flush_declarator();
                init_cut = std::string::npos; // per-declarator initializers
            } else if (tok.is(";") && paren_depth == 0) {
                end_statement(tok.pos);
            }
        }
        prev = tok;
    }
    return out;
}

std::vector<std::string> declarations_from_scanner(const std::string& c_source) {
    const CScanResult scan = scan_c_functions(c_source);

    std::vector<TopLevelSymbol> symbols;
    for (const auto& fn : scan.functions) {
        const std::size_t brace = fn.text.find('{');
        std::string sig = collapse_ws(
            std::string_view(fn.text).substr(0, brace == std::string::npos ? fn.text.size() : brace));
        TopLevelSymbol sym;
        sym.name = fn.name;
        sym.declaration = tidy_signature(strip_storage_specifiers(sig)) + ";";
        sym.order = fn.span_begin;
        symbols.push_back(std::move(sym));
    }
    for (auto& g : scan_global_variables(c_source, scan.functions))
        symbols.push_back(std::move(g));

    std::stable_sort(symbols.begin(), symbols.end(),
                     [](const TopLevelSymbol& a, const TopLevelSymbol& b) {
                         return a.order < b.order;
                     });

    std::vector<std::string> out;
    out.reserve(symbols.size());
    for (auto& s : symbols)
        out.push_back(std::move(s.declaration));
    return out;
}

// ctags -x lines: NAME KIND LINE FILE SOURCE-TEXT. Only the symbol names and
// kinds are trusted; signatures are rebuilt from the source because ctags
// output detail varies by version.
std::vector<std::pair<std::string, char>> ctags_symbols(const std::string& c_source,
                                                        const ToolchainConfig& cfg) {
    TempDir tmp("iris-ctags");
    const fs::path unit = tmp.path() / "unit.c";
    write_file(unit, c_source);

    const RunResult r = run_tool(cfg,
                                 {cfg.ctags_path.string(), "-x", "--c-kinds=fv", "--sort=no",
                                  unit.string()},
                                 tmp.path(), "ctags");
    if (r.exit_code != 0)
        throw ToolFailure("ctags", r.exit_code, sanitize_utf8(r.stderr_bytes));

    std::vector<std::pair<std::string, char>> symbols;
    std::stringstream ss(r.stdout_bytes);
    std::string line;
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::string name, kind;
        if (ls >> name >> kind)
            symbols.emplace_back(name, kind.empty() ? '?' : kind[0]);
    }
    return symbols;
}

} // namespace

std::vector<std::string> extract_declarations(const std::string& c_source,
                                              const ToolchainConfig& cfg) {
    std::vector<std::string> decls = declarations_from_scanner(c_source);

    if (cfg.ctags_available && !cfg.ctags_path.empty()) {
        // ctags drives symbol discovery; anything it reports that the scanner
        // missed is still surfaced (as a bare name) so callers see the gap.
        const auto symbols = ctags_symbols(c_source, cfg);
        for (const auto& [name, kind] : symbols) {
            const bool known = std::any_of(decls.begin(), decls.end(), [&](const std::string& d) {
                return d.find(name) != std::string::npos;
            });
            if (!known)
                decls.push_back("/* unreconstructed " + std::string(1, kind) + " */ " + name + ";");
        }
    }
    return decls;
}

bool check_compiles_both(const std::string& source, const ToolchainConfig& cfg) {
    try {
        dump_gimple(source, cfg);
    } catch (const ToolFailure&) {
        return false;
    } catch (const DumpMissing&) {
        return false;
    } catch (const Timeout&) {
        return false;
    }
    try {
        dump_llvm_ir(source, cfg);
    } catch (const ToolFailure&) {
        return false;
    } catch (const DumpMissing&) {
        return false;
    } catch (const Timeout&) {
        return false;
    }
    return true;
}

} // namespace iris
