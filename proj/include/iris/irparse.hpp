#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace iris {

// Parsing here is line/brace-level over raw dump text, never grammar-level:
// downstream consumers read and emit text, so brace balancing with
// literal/comment skipping is all that is needed, and it survives compiler
// version drift.

struct GimpleFunction {
    std::string name;       // symbol, leading '*' stripped
    std::string header;     // the signature line
    std::string body;       // verbatim substring of the dump at [span_begin, span_end)
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
};

struct LlvmFunction {
    std::string symbol;        // without the leading '@'
    std::string define_header; // the line-initial `define ...` line
    std::string body;          // verbatim substring at [span_begin, span_end)
    std::string leading_text;  // inter-function chunk preceding this define
                               // (attr comments, interleaved declares)
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
};

struct LlvmModulePrelude {
    std::string header_text;  // everything before the first function
    std::string trailer_text; // everything after the last function
};

struct LlvmModule {
    LlvmModulePrelude prelude;
    std::vector<LlvmFunction> functions;
};

struct FunctionTriplet {
    std::string c_function;
    GimpleFunction gimple_function;
    LlvmFunction llvm_function;
    std::string origin;
};

struct CFunction {
    std::string name;
    std::string text;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
};

struct CScanResult {
    std::vector<CFunction> functions;
    // Regions that looked like definitions but were not parsed (K&R-style
    // parameter declarations, mainly). Each entry: "offset N: reason".
    std::vector<std::string> unparsed;
};

struct AlignmentResult {
    std::vector<FunctionTriplet> triplets;
    std::vector<std::string> unmatched;        // "name (missing: gimple)" style
    std::vector<std::string> excluded_clones;  // dotted compiler-generated names
};

// One entry per top-level function body, in textual order. Nested lexical
// blocks are consumed by balance counting. Throws EmptyDump on blank input,
// UnbalancedBraces with the offset of the unmatched brace.
std::vector<GimpleFunction> parse_gimple_dump(const std::string& dump);

// Functions delimited by line-initial `define` through the matching close
// brace; declare lines and globals stay in the prelude or in leading_text.
// Throws EmptyDump / UnbalancedBraces.
LlvmModule parse_llvm_module(const std::string& module_text);

// Byte-exact inverse of parse_llvm_module.
std::string reassemble_module(const LlvmModule& module);

// Locates top-level ANSI function definitions with a brace/paren scanner that
// skips string/char literals, comments, and preprocessor lines.
CScanResult scan_c_functions(const std::string& c_source);

// Convenience (name, text) projection of scan_c_functions.
std::vector<std::pair<std::string, std::string>> extract_c_functions(const std::string& c_source);

// Triplets for exactly the symbols present in all three lists, matched after
// stripping a single leading underscore; compiler-generated clones (dotted
// names) are excluded and logged, unmatched names reported. Output follows
// C-source order. Throws DuplicateSymbol.
AlignmentResult align_functions(const std::vector<GimpleFunction>& gimple_fns,
                                const std::vector<LlvmFunction>& llvm_fns,
                                const std::vector<std::pair<std::string, std::string>>& c_fns,
                                const std::string& origin = "");

} // namespace iris
