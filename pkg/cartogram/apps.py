from django.apps import AppConfig


class CartogramConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cartogram'
