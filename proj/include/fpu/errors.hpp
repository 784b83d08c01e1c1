#pragma once

#include <stdexcept>
#include <string>

namespace fpu {

// Every failure raised by the library derives from Error; the CLI maps these
// to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define FPU_ERROR_KIND(Name, tag)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        using Error::Error;                                         \
        const char* kind() const noexcept override { return tag; }  \
    };

FPU_ERROR_KIND(DomainError, "domain")
FPU_ERROR_KIND(DimensionError, "dimension")
FPU_ERROR_KIND(PreconditionError, "precondition")
FPU_ERROR_KIND(DegenerateSpectrumError, "degenerate-spectrum")
FPU_ERROR_KIND(SingularFormulaError, "singular-formula")
FPU_ERROR_KIND(IncompleteSchemeError, "incomplete-scheme")
FPU_ERROR_KIND(InconsistentTransformError, "inconsistent-transform")
FPU_ERROR_KIND(CoordinateSingularityError, "coordinate-plane-singularity")
FPU_ERROR_KIND(ModeNonexistentError, "mode-nonexistent")
FPU_ERROR_KIND(UndefinedAnglesError, "undefined-angles")
FPU_ERROR_KIND(UnknownPresetError, "unknown-preset")

#undef FPU_ERROR_KIND

}  // namespace fpu
