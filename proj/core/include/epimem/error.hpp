#pragma once

#include <stdexcept>
#include <string>

namespace epimem {

// Single exception type for contract violations surfaced to callers.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace epimem
