from django.apps import AppConfig


class TransmissionConfig(AppConfig):
    name = "polcascade.transmission"
    verbose_name = "Polarizer transmission models"
