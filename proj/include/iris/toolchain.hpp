#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace iris {

enum class FrontendLanguage { c, other_gcc_frontend };

// Paths and flags for the external compilers. Run validate_toolchain() before
// use: it resolves names against IRIS_TOOLCHAIN_DIR and PATH (with versioned
// fallbacks) and checks that every required tool is executable.
struct ToolchainConfig {
    std::filesystem::path gcc_path = "gcc";
    std::filesystem::path clang_path = "clang";
    std::filesystem::path llc_path = "llc";
    std::filesystem::path clangxx_path = "clang++";
    std::filesystem::path ctags_path = "ctags";
    std::vector<std::string> extra_gcc_flags;
    std::vector<std::string> extra_clang_flags;
    FrontendLanguage frontend_language = FrontendLanguage::c;
    std::string frontend_driver = "gcc";   // gnat/gm2/... for other frontends
    std::string source_extension = ".c";
    std::chrono::duration<double> timeout{60.0};

    // Set by validation.
    bool validated = false;
    bool llc_is_clang_driver = false;      // no llc found; clang compiles the .ll
    bool ctags_available = false;          // absent ctags falls back to the scanner
};

// Resolves and checks all tool paths. Throws ConfigError when a required tool
// is missing. ctags and llc are optional: llc falls back to the clang driver,
// ctags to built-in declaration scanning.
ToolchainConfig validate_toolchain(ToolchainConfig cfg);

struct CompileOutcome {
    bool success = false;
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
    std::vector<std::filesystem::path> produced_artifacts;
    double wall_time_s = 0.0;
};

// Token substituted for the per-invocation temp dir in stored dump text, so
// corpora are machine-independent.
inline constexpr const char* kTranslationUnitToken = "<TU>";

// gcc -O0 -fdump-tree-gimple -c in a fresh temp dir; returns the dump text
// with the temp path scrubbed. The temp dir is removed before returning.
// Throws ToolFailure / DumpMissing / Timeout.
std::string dump_gimple(const std::string& source, const ToolchainConfig& cfg);

// clang -O0 -S -emit-llvm; returns the .ll text. Same error contract.
std::string dump_llvm_ir(const std::string& source, const ToolchainConfig& cfg);

// Compiles candidate IR text to an object file under out_dir. Throws
// IrRejected (the "does not compile" verdict, diagnostics preserved) or
// Timeout. Returns the object path on success.
std::filesystem::path compile_ir_to_object(const std::string& llvm_ir,
                                           const ToolchainConfig& cfg,
                                           const std::filesystem::path& out_dir);

// Links an object with a C++ wrapper translation unit via clang++. The
// wrapper must already carry its extern "C" declaration block. Throws
// LinkFailure / Timeout.
std::filesystem::path link_with_wrapper(const std::filesystem::path& object,
                                        const std::string& wrapper_cpp,
                                        const ToolchainConfig& cfg,
                                        const std::filesystem::path& out_dir);

// Links a self-contained object (candidate defines main) via clang.
std::filesystem::path link_executable(const std::filesystem::path& object,
                                      const ToolchainConfig& cfg,
                                      const std::filesystem::path& out_dir);

// One declaration per function/global defined in the source, in source order,
// each suitable for an extern "C" { } block (globals get an extern prefix).
// Uses ctags for symbol discovery when available, the built-in scanner
// otherwise; signatures are always reconstructed from the source text.
std::vector<std::string> extract_declarations(const std::string& c_source,
                                              const ToolchainConfig& cfg);

// True iff both dumps succeed. Tool failures map to false; a broken config
// still throws ConfigError.
bool check_compiles_both(const std::string& source, const ToolchainConfig& cfg);

} // namespace iris
