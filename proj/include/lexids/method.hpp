#pragma once

#include <optional>
#include <string_view>

namespace lexids {

// Selection conditions. `lex` is plain lexicase selection on the full
// training set; the other three name the down-sample construction that runs
// before selection.
enum class Method { lex, rand, ids, full_ids };

constexpr std::string_view method_name(Method m) {
    switch (m) {
        case Method::lex: return "lex";
        case Method::rand: return "rand";
        case Method::ids: return "ids";
        case Method::full_ids: return "full-ids";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    if (s == "lex") return Method::lex;
    if (s == "rand") return Method::rand;
    if (s == "ids") return Method::ids;
    if (s == "full-ids" || s == "fullids" || s == "full_ids") return Method::full_ids;
    return std::nullopt;
}

}  // namespace lexids
