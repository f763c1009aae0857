from __future__ import annotations

from dataclasses import dataclass, replace


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Variant switches selecting one instance of the model.

    ``gic_extension=None`` means "enable exactly when the test touches a GIC
    register". ``eoimode`` applies to threads whose init does not set one.
    """

    feat_exs: bool = False
    eis: bool = True
    eos: bool = True
    sea_r: bool = False
    sea_w: bool = False
    ets2: bool = True
    eoimode: int = 0
    gic_extension: bool | None = None
    max_takes: int = 2
    max_candidates: int = 2_000_000
    max_steps: int = 400

    def __post_init__(self):
        if self.eoimode not in (0, 1):
            raise ConfigError("eoimode must be 0 or 1")
        if not self.feat_exs and not (self.eis and self.eos):
            raise ConfigError("EIS/EOS can only be cleared when FEAT_ExS is implemented")
        if self.max_takes < 0 or self.max_candidates < 1:
            raise ConfigError("bounds must be positive")

    @property
    def cse_on_entry(self) -> bool:
        return not (self.feat_exs and not self.eis)

    @property
    def cse_on_exit(self) -> bool:
        return not (self.feat_exs and not self.eos)

    @classmethod
    def variant(cls, name: str, **kw) -> "ModelConfig":
        """Build a config from a ``+``-joined variant name such as ``sea_r+eoimode1``."""
        fields: dict = {}
        for flag in name.lower().split("+"):
            if flag == "default":
                continue
            elif flag == "exs":
                fields.update(feat_exs=True, eis=False, eos=False)
            elif flag == "eis":  # FEAT_ExS with only entry synchronisation kept
                fields.update(feat_exs=True, eis=True, eos=False)
            elif flag == "eos":
                fields.update(feat_exs=True, eis=False, eos=True)
            elif flag == "sea_r":
                fields["sea_r"] = True
            elif flag == "sea_w":
                fields["sea_w"] = True
            elif flag == "sea_rw":
                fields.update(sea_r=True, sea_w=True)
            elif flag == "no_ets2":
                fields["ets2"] = False
            elif flag in ("eoimode0", "eoimode1"):
                fields["eoimode"] = int(flag[-1])
            elif flag == "gic":
                fields["gic_extension"] = True
            else:
                raise ConfigError(f"unknown variant flag {flag!r}")
        fields.update(kw)
        return cls(**fields)

    def with_(self, **kw) -> "ModelConfig":
        return replace(self, **kw)

    def describe(self) -> dict:
        return {
            "feat_exs": self.feat_exs, "eis": self.eis, "eos": self.eos,
            "sea_r": self.sea_r, "sea_w": self.sea_w, "ets2": self.ets2,
            "eoimode": self.eoimode, "gic_extension": self.gic_extension,
        }
