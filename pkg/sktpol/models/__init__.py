# sktpol - Models
