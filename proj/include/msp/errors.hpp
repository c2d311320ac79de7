#ifndef MSP_ERRORS_HPP
#define MSP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace msp {

/// Base for every physics-domain failure. name() is the stable identifier
/// the CLI prints next to exit status 3.
class Error : public std::runtime_error
{
public:
    Error(std::string_view name, const std::string& what)
        : std::runtime_error(what), m_name(name) {}

    [[nodiscard]] const std::string& name() const noexcept { return m_name; }

private:
    std::string m_name;
};

#define MSP_DEFINE_ERROR(Type)                                                 \
    class Type : public Error                                                  \
    {                                                                          \
    public:                                                                    \
        explicit Type(const std::string& what) : Error(#Type, what) {}         \
    }

MSP_DEFINE_ERROR(InvalidArgument);
MSP_DEFINE_ERROR(NoBoundState);
MSP_DEFINE_ERROR(GridTooCoarse);
MSP_DEFINE_ERROR(NonPositiveSpectrum);
MSP_DEFINE_ERROR(AngleOutOfRange);
MSP_DEFINE_ERROR(QuadratureNotConverged);
MSP_DEFINE_ERROR(HalfMaxNotBracketed);
MSP_DEFINE_ERROR(NotUnimodal);
MSP_DEFINE_ERROR(LightConePoint);
MSP_DEFINE_ERROR(NoLocalizedMode);

#undef MSP_DEFINE_ERROR

} // namespace msp

#endif
