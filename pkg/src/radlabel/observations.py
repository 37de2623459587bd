"""The canonical set of chest radiograph observations.

Fourteen observations are labeled per report: twelve pathologies plus
Support Devices and the derived No Finding.  `OBSERVATIONS` fixes the
canonical CSV column order used by every reader and writer in the package.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Observation:
    """One labeled observation.

    Attributes:
        name: Canonical display name, used in CSV headers.
        slug: Lowercase identifier, used for phrase file names.
        is_pathology: True for the 12 pathologies; False for Support
            Devices and No Finding.
    """

    name: str
    slug: str
    is_pathology: bool


NO_FINDING = Observation("No Finding", "no_finding", False)

OBSERVATIONS = (
    NO_FINDING,
    Observation("Enlarged Cardiomediastinum", "enlarged_cardiomediastinum", True),
    Observation("Cardiomegaly", "cardiomegaly", True),
    Observation("Lung Lesion", "lung_lesion", True),
    Observation("Lung Opacity", "lung_opacity", True),
    Observation("Edema", "edema", True),
    Observation("Consolidation", "consolidation", True),
    Observation("Pneumonia", "pneumonia", True),
    Observation("Atelectasis", "atelectasis", True),
    Observation("Pneumothorax", "pneumothorax", True),
    Observation("Pleural Effusion", "pleural_effusion", True),
    Observation("Pleural Other", "pleural_other", True),
    Observation("Fracture", "fracture", True),
    Observation("Support Devices", "support_devices", False),
)

# Observations that can carry mentions in report text.  No Finding is derived
# from the other labels and never matched directly.
MENTIONABLE = tuple(o for o in OBSERVATIONS if o is not NO_FINDING)

PATHOLOGIES = tuple(o for o in OBSERVATIONS if o.is_pathology)

BY_NAME = {o.name: o for o in OBSERVATIONS}
BY_SLUG = {o.slug: o for o in OBSERVATIONS}
