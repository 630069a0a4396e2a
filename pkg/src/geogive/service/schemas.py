"""Request body models for the JSON API."""

from __future__ import annotations

from datetime import datetime
from typing import Literal

from pydantic import BaseModel, ConfigDict


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PositionBody(_Body):
    lat: float
    lon: float
    recorded_at: datetime | None = None


class SignupBody(_Body):
    display_name: str
    locale: str = "en"
    method: Literal["email", "provider"]
    email: str | None = None
    password: str | None = None
    provider: str | None = None
    token: str | None = None


class LoginBody(_Body):
    method: Literal["email", "provider"]
    email: str | None = None
    password: str | None = None
    provider: str | None = None
    token: str | None = None


class ChannelBody(_Body):
    enabled: bool = False
    detail: str = ""


class ContactMethodsBody(_Body):
    email: ChannelBody = ChannelBody()
    facebook: ChannelBody = ChannelBody()
    phone: ChannelBody = ChannelBody()
    whatsapp: ChannelBody = ChannelBody()


class SettingsBody(_Body):
    display_name: str | None = None
    picture_ref: str | None = None
    contact_methods: ContactMethodsBody | None = None
    locale: str | None = None
    home_position: PositionBody | None = None


class OfferBody(_Body):
    title: str
    description: str = ""
    photo_ref: str | None = None
    pickup_position: PositionBody


class CompleteBody(_Body):
    collector_id: str | None = None


class BlockBody(_Body):
    user_id: str


class ConsentBody(_Body):
    study_consent: bool
    location_logging_consent: bool = False
    locale_shown: str = "en"


class DemographicsBody(_Body):
    age_range: str | None = None
    gender: str | None = None
    origin_country: str | None = None
    user_group: Literal["forced_migrant", "local_freecycler", "unspecified"] = "unspecified"


class ItemsBody(_Body):
    items: list[int]


class UsefulnessBody(_Body):
    ratings: dict[str, int]


class ReviewBody(_Body):
    task_id: str
    place: str = ""
    place_category: str | None = None
    contact_channel: str
    satisfaction: int
    likely_repeat: int
    counterparty_id: str | None = None


class RejectBody(_Body):
    reason: str | None = None


class LocaleAddBody(_Body):
    bundle: dict
