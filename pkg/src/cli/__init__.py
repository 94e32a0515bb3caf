"""Командный интерфейс инструментария: разбор аргументов и подкоманды."""
