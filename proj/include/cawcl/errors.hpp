#ifndef CAWCL_ERRORS_HPP
#define CAWCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cawcl {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CAWCL_ERROR_TYPE(Name)                                                 \
    struct Name : Error {                                                      \
        using Error::Error;                                                    \
    }

// numeric core
CAWCL_ERROR_TYPE(NearZeroNorm);
CAWCL_ERROR_TYPE(NonFiniteLoss);
CAWCL_ERROR_TYPE(ShapeMismatch);
CAWCL_ERROR_TYPE(BadEps);

// model / batches
CAWCL_ERROR_TYPE(EmptyTracklet);
CAWCL_ERROR_TYPE(NoSourceRows);
CAWCL_ERROR_TYPE(NoTargetRows);

// contrastive / self-paced
CAWCL_ERROR_TYPE(WeightOutOfRange);
CAWCL_ERROR_TYPE(IndexOutOfRange);
CAWCL_ERROR_TYPE(SelfPair);
CAWCL_ERROR_TYPE(NonPositiveGamma);
CAWCL_ERROR_TYPE(NegativePairLoss);
CAWCL_ERROR_TYPE(UnknownLabel);
CAWCL_ERROR_TYPE(TooFewSamples);

// clustering
CAWCL_ERROR_TYPE(BadK);
CAWCL_ERROR_TYPE(AsymmetricMatrix);
CAWCL_ERROR_TYPE(BadMinPts);

// memory bank
CAWCL_ERROR_TYPE(EmptyInput);
CAWCL_ERROR_TYPE(BadMomentum);
CAWCL_ERROR_TYPE(UnknownSample);

// data generation / clips
CAWCL_ERROR_TYPE(BadConfig);
CAWCL_ERROR_TYPE(TooFewFrames);
CAWCL_ERROR_TYPE(ClipTooShort);

// evaluation
CAWCL_ERROR_TYPE(NoValidMatch);
CAWCL_ERROR_TYPE(DimMismatch);

// command line / artifacts
CAWCL_ERROR_TYPE(ConfigError);
CAWCL_ERROR_TYPE(DataError);
CAWCL_ERROR_TYPE(NumericalError);

#undef CAWCL_ERROR_TYPE

} // namespace cawcl

#endif
