#ifndef QDPAIR_VERSION_HPP
#define QDPAIR_VERSION_HPP

namespace qdpair
{
inline constexpr const char* kVersion = "0.1.0";
}

#endif // QDPAIR_VERSION_HPP
