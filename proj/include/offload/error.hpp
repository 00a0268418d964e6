#pragma once

#include <stdexcept>
#include <string>

namespace offload {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace offload
