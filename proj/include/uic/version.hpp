#ifndef UIC_VERSION_HPP_
#define UIC_VERSION_HPP_

namespace uic {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace uic

#endif  // UIC_VERSION_HPP_
